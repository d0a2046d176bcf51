//! Adaptive random-walk Metropolis over the unconstrained vector.
//!
//! The chain starts at `x = 0` (every entry at the midpoint of its
//! interval). During warmup the proposal scale is tuned on the log scale by
//! Robbins-Monro, `ln eps += (alpha - target_accept) / t^0.6`; afterwards it
//! is frozen. Proposals that land outside the feasible set (an empty
//! interval, an unrealizable pin, or a saturated logistic) are rejected as
//! if their density were zero. An infeasible starting point is an error.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{row_major_entries, BoundsSpec, Entry, FixedValueSpec};
use crate::density::{evaluate, Evaluated, LkjShape};
use crate::error::{Error, Result};
use crate::factor::CholFactor;
use crate::transform::to_correlation;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub bounds: BoundsSpec,
    pub eta: LkjShape,
    pub fixed: Option<FixedValueSpec>,
    pub warmup: usize,
    /// Number of retained draws.
    pub samples: usize,
    /// Iterations per retained draw after warmup.
    pub thin: usize,
    pub seed: u64,
    pub initial_scale: f64,
    pub target_accept: f64,
}

impl SamplerConfig {
    pub fn new(bounds: BoundsSpec, eta: LkjShape) -> Self {
        SamplerConfig {
            bounds,
            eta,
            fixed: None,
            warmup: 1000,
            samples: 1000,
            thin: 1,
            seed: 0,
            initial_scale: 1.0,
            target_accept: 0.4,
        }
    }

    pub fn n(&self) -> usize {
        self.bounds.n()
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be >= 1".into()));
        }
        if self.thin < 1 {
            return Err(Error::InvalidConfig("thin must be >= 1".into()));
        }
        if !(self.initial_scale.is_finite() && self.initial_scale > 0.0) {
            return Err(Error::InvalidConfig(format!("initial_scale must be > 0, got {}", self.initial_scale)));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target_accept must lie in (0, 1), got {}",
                self.target_accept
            )));
        }
        if let Some(f) = &self.fixed {
            if f.n() != self.n() {
                return Err(Error::DimensionMismatch { expected: self.n(), actual: f.n() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub x: Vec<f64>,
    pub factor: CholFactor,
    pub correlation: DMatrix<f64>,
    pub log_posterior: f64,
}

impl Draw {
    fn from_eval(x: &[f64], ev: &Evaluated) -> Self {
        Draw {
            x: x.to_vec(),
            factor: ev.transform.factor.clone(),
            correlation: to_correlation(&ev.transform.factor),
            log_posterior: ev.log_posterior,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub draws: Vec<Draw>,
    /// Fraction of accepted proposals after warmup.
    pub accept_rate: f64,
    /// Proposal scale after adaptation.
    pub step_size: f64,
    pub seed: u64,
}

pub fn run_chain(config: &SamplerConfig) -> Result<ChainOutput> {
    config.validate()?;
    let n = config.n();
    let dim = n * (n - 1) / 2 - config.fixed.as_ref().map_or(0, FixedValueSpec::len);
    let target = |x: &[f64]| evaluate(x, &config.bounds, config.eta, config.fixed.as_ref());

    let mut x = vec![0.0; dim];
    let mut current = target(&x).map_err(|e| Error::InfeasibleAtInit(Box::new(e)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut log_eps = config.initial_scale.ln();
    let mut proposal = vec![0.0; dim];

    let total = config.warmup + config.samples * config.thin;
    let mut draws = Vec::with_capacity(config.samples);
    let mut accepted = 0usize;
    for iter in 0..total {
        let eps = log_eps.exp();
        for (p, xi) in proposal.iter_mut().zip(&x) {
            let z: f64 = rng.sample(StandardNormal);
            *p = xi + eps * z;
        }
        let u: f64 = rng.random();
        let (alpha, moved) = match target(&proposal) {
            Ok(ev) => {
                let alpha = (ev.log_posterior - current.log_posterior).exp().min(1.0);
                if u < alpha {
                    x.copy_from_slice(&proposal);
                    current = ev;
                    (alpha, true)
                } else {
                    (alpha, false)
                }
            }
            Err(e) if e.is_infeasible() => {
                log::trace!("iter {iter}: rejected infeasible proposal: {e}");
                (0.0, false)
            }
            Err(e) => return Err(e),
        };
        if iter < config.warmup {
            log_eps += (alpha - config.target_accept) / ((iter + 1) as f64).powf(0.6);
        } else {
            accepted += moved as usize;
            if (iter - config.warmup + 1).is_multiple_of(config.thin) {
                draws.push(Draw::from_eval(&x, &current));
            }
        }
        log::debug!(
            "iter {iter} log_post {:.6} alpha {alpha:.3} accepted {moved} eps {:.4}",
            current.log_posterior,
            log_eps.exp()
        );
    }

    let post = config.samples * config.thin;
    Ok(ChainOutput {
        draws,
        accept_rate: accepted as f64 / post as f64,
        step_size: log_eps.exp(),
        seed: config.seed,
    })
}

/// Marginal summary of one correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSummary {
    pub entry: Entry,
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub entries: Vec<CorrelationSummary>,
    pub accept_rate: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(chain: &ChainOutput) -> Result<ChainSummary> {
    if chain.draws.len() < 2 {
        return Err(Error::EmptyChain(chain.draws.len()));
    }
    let n = chain.draws[0].correlation.nrows();
    let count = chain.draws.len() as f64;
    let entries = row_major_entries(n)
        .map(|e| {
            let mut v: Vec<f64> = chain
                .draws
                .iter()
                .map(|d| d.correlation[(e.row - 1, e.col - 1)])
                .collect();
            let mean = v.iter().sum::<f64>() / count;
            let var = v.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (count - 1.0);
            v.sort_by(f64::total_cmp);
            CorrelationSummary {
                entry: e,
                mean,
                sd: var.sqrt(),
                q05: quantile(&v, 0.05),
                q95: quantile(&v, 0.95),
            }
        })
        .collect();
    Ok(ChainSummary { entries, accept_rate: chain.accept_rate })
}
