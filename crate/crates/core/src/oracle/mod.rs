//! Brute-force verifiers for the transform.
//!
//! Nothing here shares code paths with [`crate::transform`] beyond calling
//! its public forward map as a black box: Jacobians come from central
//! differences and a full LU determinant, bounds are recomputed from scratch
//! with explicit sums, and the distributional reference is a rejection
//! sampler over the bounded cube.

pub mod stats;

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{num_offdiag, row_major_entries, BoundsSpec, Entry};
use crate::error::{Error, Result};
use crate::factor::CholFactor;
use crate::transform::{consumption_order, forward_variant, Variant};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// `ln |det dL/dx|` by central differences with the standard forward map.
pub fn numerical_jacobian_logdet(x: &[f64], bounds: &BoundsSpec, h: f64) -> Result<f64> {
    numerical_jacobian_logdet_with(Variant::Standard, x, bounds, h)
}

/// As [`numerical_jacobian_logdet`] for either forward variant. If a
/// perturbed point is infeasible, retries once with `h / 10`.
pub fn numerical_jacobian_logdet_with(variant: Variant, x: &[f64], bounds: &BoundsSpec, h: f64) -> Result<f64> {
    match fd_logdet(variant, x, bounds, h) {
        Err(Error::PerturbationInfeasible(_)) => fd_logdet(variant, x, bounds, h / 10.0),
        other => other,
    }
}

/// Strict-lower entries of `L` in consumption order.
fn outputs(variant: Variant, x: &[f64], bounds: &BoundsSpec) -> Result<Vec<f64>> {
    let l = forward_variant(x, bounds, variant)?.factor;
    Ok(consumption_order(bounds.n()).map(|e| l.at(e.row, e.col)).collect())
}

fn fd_logdet(variant: Variant, x: &[f64], bounds: &BoundsSpec, h: f64) -> Result<f64> {
    let d = x.len();
    outputs(variant, x, bounds)?;
    let mut jac = DMatrix::<f64>::zeros(d, d);
    let mut xp = x.to_vec();
    for k in 0..d {
        xp[k] = x[k] + h;
        let plus = outputs(variant, &xp, bounds).map_err(|e| Error::PerturbationInfeasible(Box::new(e)))?;
        xp[k] = x[k] - h;
        let minus = outputs(variant, &xp, bounds).map_err(|e| Error::PerturbationInfeasible(Box::new(e)))?;
        xp[k] = x[k];
        for r in 0..d {
            jac[(r, k)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    Ok(jac.lu().determinant().abs().ln())
}

/// Interval check for one strict-lower entry of a factor.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryReport {
    pub entry: Entry,
    /// Admissible interval for `L_ij`.
    pub lb: f64,
    pub ub: f64,
    /// Interval of `C_ij` values that keep the matrix positive definite
    /// given the entries before it, ignoring the user bounds.
    pub pd_lb: f64,
    pub pd_ub: f64,
    pub value: f64,
    pub ok: bool,
}

/// Recompute every entry's admissible interval from scratch: stick lengths
/// and inner products are full sums over the factor, and the interval is
/// formed on the correlation scale before converting back.
pub fn recompute_factor_bounds(l: &CholFactor, bounds: &BoundsSpec) -> Vec<EntryReport> {
    row_major_entries(l.n())
        .map(|e| {
            let (i, j) = (e.row, e.col);
            let residual: f64 = 1.0 - (1..j).map(|k| l.at(i, k).powi(2)).sum::<f64>();
            let stick = residual.max(0.0).sqrt();
            let l_jj = l.at(j, j);
            let z: f64 = (1..j).map(|k| l.at(i, k) * l.at(j, k)).sum();
            let (a, b) = bounds.get(e);
            let pd_lb = z - stick * l_jj;
            let pd_ub = z + stick * l_jj;
            let c_lb = a.max(pd_lb);
            let c_ub = b.min(pd_ub);
            let lb = (c_lb - z) / l_jj;
            let ub = (c_ub - z) / l_jj;
            let value = l.at(i, j);
            EntryReport {
                entry: e,
                lb,
                ub,
                pd_lb,
                pd_ub,
                value,
                ok: lb < ub && lb < value && value < ub,
            }
        })
        .collect()
}

/// Draws from the reference sampler.
#[derive(Debug, Clone)]
pub struct ReferenceDraws {
    pub draws: Vec<DMatrix<f64>>,
    /// Accepted fraction of candidate matrices.
    pub acceptance: f64,
}

const PROBE_BATCH: usize = 10_000;

/// Uniform draws over `{C positive definite, a_ij < C_ij < b_ij}`, which is
/// LKJ(1) restricted to the bounds: each off-diagonal is drawn uniformly in
/// its interval and the matrix is kept iff it admits a Cholesky factor.
pub fn rejection_sample_reference(n: usize, bounds: &BoundsSpec, count: usize, seed: u64) -> Result<ReferenceDraws> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidConfig(format!("rejection reference supports 2 <= n <= 4, got {n}")));
    }
    if bounds.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: bounds.n() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<_> = row_major_entries(n).map(|e| (e, bounds.get(e))).collect();
    debug_assert_eq!(entries.len(), num_offdiag(n));
    let mut draws = Vec::with_capacity(count);
    let mut tried = 0usize;
    while draws.len() < count {
        let mut c = DMatrix::<f64>::identity(n, n);
        for &(e, (a, b)) in &entries {
            let v = rng.random_range(a..b);
            c[(e.row - 1, e.col - 1)] = v;
            c[(e.col - 1, e.row - 1)] = v;
        }
        tried += 1;
        if Cholesky::new(c.clone()).is_some() {
            draws.push(c);
        }
        if tried == PROBE_BATCH {
            let rate = draws.len() as f64 / tried as f64;
            if rate < 1e-4 {
                return Err(Error::AcceptanceTooLow(rate));
            }
        }
    }
    Ok(ReferenceDraws {
        acceptance: draws.len() as f64 / tried as f64,
        draws,
    })
}
