//! `corrchol`: transform, invert, sample, or probe bounded correlation
//! Cholesky factors from the command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 infeasible bounds.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use corrchol::io::{
    correlation_columns, parse_bounds_file, parse_factor_line, parse_pins_file, parse_vector_line, RecordFormat,
    RecordWriter,
};
use corrchol::transform::inverse_with_fixed;
use corrchol::{
    forward, forward_with_fixed, inverse, run_chain, summarize, BoundsSpec, ChainOutput, Error, FixedValueSpec,
    LkjShape, SamplerConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Map unconstrained vectors to factors and log-Jacobians.
    Transform,
    /// Map factors back to unconstrained vectors.
    Inverse,
    /// Run adaptive Metropolis under an LKJ prior.
    Sample,
    /// Probe feasibility by midpoint recursion.
    CheckBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(name = "corrchol", version, about, allow_negative_numbers = true)]
struct Cli {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Matrix dimension (optional when a bounds file supplies it).
    #[arg(long)]
    dim: Option<usize>,
    /// LKJ shape.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Lower correlation bound applied to every entry.
    #[arg(long, default_value_t = -1.0)]
    lb: f64,
    /// Upper correlation bound applied to every entry.
    #[arg(long, default_value_t = 1.0)]
    ub: f64,
    /// JSON bounds file; overrides --lb/--ub.
    #[arg(long)]
    bounds_file: Option<PathBuf>,
    /// JSON file of pinned correlations.
    #[arg(long)]
    pins_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1000)]
    warmup: usize,
    /// Iterations per retained draw.
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent chains run in parallel with derived seeds.
    #[arg(long, default_value_t = 1)]
    chains: usize,
    #[arg(long, default_value_t = 0.4)]
    target_accept: f64,
    /// Input lines for transform/inverse (default: stdin).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum Failure {
    Usage(String),
    Infeasible(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("I/O error: {e}"))
    }
}

fn classify(context: &str, e: Error) -> Failure {
    let msg = if context.is_empty() { e.to_string() } else { format!("{context}: {e}") };
    if e.is_infeasible() {
        Failure::Infeasible(msg)
    } else {
        Failure::Usage(msg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter("CORRCHOL_LOG")).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_bounds(cli: &Cli) -> Result<BoundsSpec, Failure> {
    let bounds = match &cli.bounds_file {
        Some(path) => parse_bounds_file(&read_text(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => {
            let n = cli.dim.ok_or_else(|| Failure::Usage("--dim is required without --bounds-file".into()))?;
            BoundsSpec::scalar(n, cli.lb, cli.ub).map_err(|e| Failure::Usage(e.to_string()))?
        }
    };
    if let Some(n) = cli.dim {
        if n != bounds.n() {
            return Err(Failure::Usage(format!("--dim {n} disagrees with bounds file n = {}", bounds.n())));
        }
    }
    Ok(bounds)
}

fn load_pins(cli: &Cli, n: usize) -> Result<Option<FixedValueSpec>, Failure> {
    cli.pins_file
        .as_ref()
        .map(|path| parse_pins_file(&read_text(path)?, n).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))))
        .transpose()
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, Failure> {
    Ok(match &cli.output {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn input_lines(cli: &Cli) -> Result<Vec<(usize, String)>, Failure> {
    let reader: Box<dyn BufRead> = match &cli.input {
        Some(path) => Box::new(BufReader::new(
            fs::File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufReader::new(io::stdin().lock())),
    };
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((k + 1, line));
        }
    }
    Ok(out)
}

fn record_format(f: Format) -> RecordFormat {
    match f {
        Format::Csv => RecordFormat::Csv,
        Format::Jsonl => RecordFormat::Jsonl,
    }
}

fn emit(out: &mut dyn Write, writer: &RecordWriter) -> io::Result<()> {
    if let Some(h) = writer.header() {
        writeln!(out, "{h}")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let bounds = load_bounds(cli)?;
    let n = bounds.n();
    let pins = load_pins(cli, n)?;
    match cli.mode {
        Mode::Transform => run_transform(cli, &bounds, pins.as_ref()),
        Mode::Inverse => run_inverse(cli, &bounds, pins.as_ref()),
        Mode::Sample => run_sample(cli, bounds, pins),
        Mode::CheckBounds => run_check(&bounds, pins.as_ref()),
    }
}

fn run_transform(cli: &Cli, bounds: &BoundsSpec, pins: Option<&FixedValueSpec>) -> Result<(), Failure> {
    let n = bounds.n();
    let mut columns: Vec<String> = (1..=n).flat_map(|i| (1..=i).map(move |j| format!("L_{i}_{j}"))).collect();
    columns.push("log_abs_det_jacobian".into());
    let writer = RecordWriter::new(record_format(cli.format), columns);
    let lines = input_lines(cli)?;
    let mut out = open_output(cli)?;
    emit(&mut out, &writer)?;
    for (lineno, line) in lines {
        let ctx = format!("line {lineno}");
        let x = parse_vector_line(&line).map_err(|e| classify(&ctx, e))?;
        let r = match pins {
            Some(p) => forward_with_fixed(&x, bounds, p),
            None => forward(&x, bounds),
        }
        .map_err(|e| classify(&ctx, e))?;
        let mut values = r.factor.lower_row_major();
        values.push(r.log_abs_det_jacobian);
        writeln!(out, "{}", writer.record(&[], &values))?;
    }
    out.flush()?;
    Ok(())
}

fn run_inverse(cli: &Cli, bounds: &BoundsSpec, pins: Option<&FixedValueSpec>) -> Result<(), Failure> {
    let n = bounds.n();
    let d = n * (n - 1) / 2 - pins.map_or(0, FixedValueSpec::len);
    let writer = RecordWriter::new(record_format(cli.format), (1..=d).map(|k| format!("x_{k}")).collect());
    let lines = input_lines(cli)?;
    let mut out = open_output(cli)?;
    emit(&mut out, &writer)?;
    for (lineno, line) in lines {
        let ctx = format!("line {lineno}");
        let l = parse_factor_line(&line, n).map_err(|e| classify(&ctx, e))?;
        let x = match pins {
            Some(p) => inverse_with_fixed(&l, bounds, p),
            None => inverse(&l, bounds),
        }
        .map_err(|e| classify(&ctx, e))?;
        writeln!(out, "{}", writer.record(&[], &x))?;
    }
    out.flush()?;
    Ok(())
}

/// Seed for chain `k`: chain 0 uses the given seed unchanged.
fn chain_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn run_sample(cli: &Cli, bounds: BoundsSpec, pins: Option<FixedValueSpec>) -> Result<(), Failure> {
    if cli.chains < 1 {
        return Err(Failure::Usage("--chains must be >= 1".into()));
    }
    let n = bounds.n();
    let eta = LkjShape::new(cli.eta).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut base = SamplerConfig::new(bounds, eta);
    base.fixed = pins;
    base.samples = cli.samples;
    base.warmup = cli.warmup;
    base.thin = cli.thin;
    base.target_accept = cli.target_accept;
    base.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let results: Vec<Result<ChainOutput, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cli.chains)
            .map(|k| {
                let mut cfg = base.clone();
                cfg.seed = chain_seed(cli.seed, k);
                s.spawn(move || run_chain(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let chains = results
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.map_err(|e| classify(&format!("chain {k}"), e)))
        .collect::<Result<Vec<_>, _>>()?;

    let entries = correlation_columns(n);
    let multi = cli.chains > 1;
    let mut columns: Vec<String> = Vec::new();
    if multi {
        columns.push("chain".into());
    }
    columns.extend(entries.iter().map(|e| format!("C_{}_{}", e.row, e.col)));
    columns.push("log_posterior".into());
    let writer = RecordWriter::new(record_format(cli.format), columns);

    let mut out = open_output(cli)?;
    emit(&mut out, &writer)?;
    let mut values = Vec::with_capacity(entries.len() + 1);
    for (k, chain) in chains.iter().enumerate() {
        for d in &chain.draws {
            values.clear();
            values.extend(entries.iter().map(|e| d.correlation[(e.row - 1, e.col - 1)]));
            values.push(d.log_posterior);
            let ids: &[u64] = if multi { &[k as u64] } else { &[] };
            writeln!(out, "{}", writer.record(ids, &values))?;
        }
    }
    out.flush()?;

    for (k, chain) in chains.iter().enumerate() {
        if let Ok(summary) = summarize(chain) {
            eprintln!("chain {k}: acceptance {:.3}, step size {:.4}", summary.accept_rate, chain.step_size);
            for s in &summary.entries {
                eprintln!(
                    "  C_{}_{}: mean {:+.4} sd {:.4} q05 {:+.4} q95 {:+.4}",
                    s.entry.row, s.entry.col, s.mean, s.sd, s.q05, s.q95
                );
            }
        }
    }
    Ok(())
}

fn run_check(bounds: &BoundsSpec, pins: Option<&FixedValueSpec>) -> Result<(), Failure> {
    let d = bounds.n() * (bounds.n() - 1) / 2 - pins.map_or(0, FixedValueSpec::len);
    let x = vec![0.0; d];
    let r = match pins {
        Some(p) => forward_with_fixed(&x, bounds, p),
        None => forward(&x, bounds),
    };
    match r {
        Ok(_) => {
            println!("feasible at midpoint recursion (a probe, not a proof that every point is feasible)");
            Ok(())
        }
        Err(e) => Err(classify("midpoint recursion", e)),
    }
}
