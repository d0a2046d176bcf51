//! Text formats read and written by the command-line tool.
//!
//! Bounds file (1-based indices, `i > j`, entries override the default):
//!
//! ```json
//! {"n": 3, "default": [-1.0, 1.0], "entries": [{"i": 3, "j": 2, "lb": 0.0, "ub": 0.5}]}
//! ```
//!
//! Pins file:
//!
//! ```json
//! {"pins": [{"i": 2, "j": 1, "value": 0.0}]}
//! ```
//!
//! Vectors and factors travel as one comma-separated line each. Numbers are
//! written with 17 significant digits so every `f64` round-trips.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::bounds::{BoundsSpec, Entry, FixedValueSpec};
use crate::error::{Error, Result};
use crate::factor::CholFactor;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsFile {
    n: usize,
    #[serde(default = "full_range")]
    default: [f64; 2],
    #[serde(default)]
    entries: Vec<BoundsEntry>,
}

fn full_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsEntry {
    i: usize,
    j: usize,
    lb: f64,
    ub: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PinsFile {
    pins: Vec<PinEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PinEntry {
    i: usize,
    j: usize,
    value: f64,
}

/// Largest dimension accepted from a file; keeps a hostile `n` from
/// allocating unbounded tables.
pub const MAX_FILE_DIM: usize = 1024;

pub fn parse_bounds_file(text: &str) -> Result<BoundsSpec> {
    let file: BoundsFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("bounds file: {e}")))?;
    if file.n > MAX_FILE_DIM {
        return Err(Error::InvalidBounds(format!("n = {} exceeds {MAX_FILE_DIM}", file.n)));
    }
    let mut seen = std::collections::HashSet::new();
    for e in &file.entries {
        if !seen.insert((e.i, e.j)) {
            return Err(Error::InvalidBounds(format!("duplicate entry ({}, {})", e.i, e.j)));
        }
    }
    BoundsSpec::with_overrides(
        file.n,
        (file.default[0], file.default[1]),
        file.entries.iter().map(|e| (Entry::new(e.i, e.j), e.lb, e.ub)),
    )
}

pub fn parse_pins_file(text: &str, n: usize) -> Result<FixedValueSpec> {
    let file: PinsFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("pins file: {e}")))?;
    FixedValueSpec::new(n, file.pins.iter().map(|p| (Entry::new(p.i, p.j), p.value)))
}

/// Parse one comma-separated line of finite numbers.
pub fn parse_vector_line(line: &str) -> Result<Vec<f64>> {
    let line = line.trim();
    if line.is_empty() {
        return Err(Error::Parse("empty line".into()));
    }
    line.split(',')
        .enumerate()
        .map(|(k, field)| {
            let field = field.trim();
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("field {}: cannot parse {field:?}", k + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("field {}: non-finite value {field:?}", k + 1)))
            }
        })
        .collect()
}

/// Parse a factor given as its lower triangle, row by row, diagonal included.
pub fn parse_factor_line(line: &str, n: usize) -> Result<CholFactor> {
    CholFactor::from_lower_row_major(n, &parse_vector_line(line)?)
}

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Output record layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

/// Writes flat numeric records with a fixed column list.
#[derive(Debug, Clone)]
pub struct RecordWriter {
    format: RecordFormat,
    columns: Vec<String>,
}

impl RecordWriter {
    pub fn new(format: RecordFormat, columns: Vec<String>) -> Self {
        RecordWriter { format, columns }
    }

    /// Header line for CSV, `None` for JSON lines.
    pub fn header(&self) -> Option<String> {
        match self.format {
            RecordFormat::Csv => Some(self.columns.join(",")),
            RecordFormat::Jsonl => None,
        }
    }

    /// Format one record. `ids` fill the leading integer columns, `values`
    /// the remaining ones.
    pub fn record(&self, ids: &[u64], values: &[f64]) -> String {
        assert_eq!(ids.len() + values.len(), self.columns.len(), "record width");
        let fields = ids
            .iter()
            .map(u64::to_string)
            .chain(values.iter().map(|&v| format_f64(v)));
        match self.format {
            RecordFormat::Csv => fields.collect::<Vec<_>>().join(","),
            RecordFormat::Jsonl => {
                let mut out = String::from("{");
                for (k, (name, field)) in self.columns.iter().zip(fields).enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{name}\":{field}");
                }
                out.push('}');
                out
            }
        }
    }
}

/// Column names `C_i_j` for strict-lower correlations in column-major order:
/// (2,1), (3,1), ..., (n,1), (3,2), ...
pub fn correlation_columns(n: usize) -> Vec<Entry> {
    (1..n).flat_map(|j| (j + 1..=n).map(move |i| Entry::new(i, j))).collect()
}
