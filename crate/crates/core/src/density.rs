//! Log target density over the unconstrained space.
//!
//! All densities here are unnormalized: the LKJ normalizing constant is
//! dropped, so values are only meaningful up to an additive constant that
//! depends on `n` and `eta`. That is all Metropolis needs. Do not compare
//! them across dimensions or shapes.

use crate::bounds::{BoundsSpec, FixedValueSpec};
use crate::error::{Error, Result};
use crate::factor::CholFactor;
use crate::transform::{forward, forward_with_fixed, TransformResult};

/// Shape parameter of the LKJ distribution (`eta > 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkjShape(f64);

impl LkjShape {
    pub fn new(eta: f64) -> Result<Self> {
        if eta.is_finite() && eta > 0.0 {
            Ok(LkjShape(eta))
        } else {
            Err(Error::NonPositiveEta(eta))
        }
    }

    pub fn eta(self) -> f64 {
        self.0
    }
}

/// Unnormalized LKJ log density of a Cholesky factor:
/// `sum_{k=2}^{n} (n - k + 2 eta - 2) ln L_kk`.
///
/// The density is with respect to Lebesgue measure on the strict-lower
/// entries of `L`, which is the space the transform's Jacobian targets.
pub fn lkj_cholesky_logpdf(l: &CholFactor, eta: LkjShape) -> f64 {
    let n = l.n();
    let m = l.as_matrix();
    (2..=n)
        .map(|k| (n as f64 - k as f64 + 2.0 * eta.0 - 2.0) * m[(k - 1, k - 1)].ln())
        .sum()
}

/// A point of the unconstrained space pushed through the transform, with
/// its log posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub transform: TransformResult,
    pub log_posterior: f64,
}

/// `lkj_cholesky_logpdf(L) + log|J|` with `L` from the forward map.
/// Transform errors propagate unchanged.
pub fn evaluate(
    x: &[f64],
    bounds: &BoundsSpec,
    eta: LkjShape,
    fixed: Option<&FixedValueSpec>,
) -> Result<Evaluated> {
    let transform = match fixed {
        Some(f) => forward_with_fixed(x, bounds, f)?,
        None => forward(x, bounds)?,
    };
    let log_posterior = lkj_cholesky_logpdf(&transform.factor, eta) + transform.log_abs_det_jacobian;
    Ok(Evaluated { transform, log_posterior })
}

pub fn log_posterior(
    x: &[f64],
    bounds: &BoundsSpec,
    eta: LkjShape,
    fixed: Option<&FixedValueSpec>,
) -> Result<f64> {
    evaluate(x, bounds, eta, fixed).map(|e| e.log_posterior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Entry;
    use crate::transform::to_correlation;
    use nalgebra::DMatrix;

    fn eta(v: f64) -> LkjShape {
        LkjShape::new(v).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(LkjShape::new(0.0).is_err());
        assert!(LkjShape::new(-1.0).is_err());
        assert!(LkjShape::new(f64::NAN).is_err());
        assert!(LkjShape::new(f64::INFINITY).is_err());
        assert_eq!(LkjShape::new(0.5).unwrap().eta(), 0.5);
    }

    #[test]
    fn identity_is_zero() {
        for n in 2..6 {
            for e in [0.3, 1.0, 4.0] {
                assert_eq!(lkj_cholesky_logpdf(&CholFactor::identity(n), eta(e)), 0.0);
            }
        }
    }

    #[test]
    fn uniform_in_two_dimensions() {
        let l = CholFactor::from_lower_row_major(2, &[1.0, 0.6, 0.8]).unwrap();
        assert_eq!(lkj_cholesky_logpdf(&l, eta(1.0)), 0.0);
    }

    #[test]
    fn three_by_three_shape_two() {
        let l = CholFactor::from_lower_row_major(3, &[1.0, 0.6, 0.8, 0.8, 0.0, 0.6]).unwrap();
        // 3 ln 0.8 + 2 ln 0.6, mpmath at 30 digits
        let v = lkj_cholesky_logpdf(&l, eta(2.0));
        assert!((v + 1.691_081_901_474_610_6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn ignores_strict_lower_entries() {
        let a = CholFactor::from_lower_row_major(3, &[1.0, 0.6, 0.8, 0.8, 0.0, 0.6]).unwrap();
        let b = CholFactor::from_lower_row_major(3, &[1.0, -0.6, 0.8, 0.0, -0.8, 0.6]).unwrap();
        for e in [0.5, 1.0, 3.0] {
            assert_eq!(lkj_cholesky_logpdf(&a, eta(e)), lkj_cholesky_logpdf(&b, eta(e)));
        }
    }

    #[test]
    fn matches_determinant_form() {
        // det(C)^(eta-1) times the Jacobian prod_j L_jj^(n-j) of L -> C.
        let bounds = BoundsSpec::scalar(4, -1.0, 1.0).unwrap();
        let x = [0.3, -1.2, 0.8, 2.0, -0.5, 0.1];
        let l = forward(&x, &bounds).unwrap().factor;
        let c: DMatrix<f64> = to_correlation(&l);
        let n = 4;
        for e in [0.5, 1.0, 2.5] {
            let jac: f64 = (1..=n).map(|j| (n - j) as f64 * l.at(j, j).ln()).sum();
            let reference = (e - 1.0) * c.determinant().ln() + jac;
            assert!((lkj_cholesky_logpdf(&l, eta(e)) - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn log_posterior_examples() {
        let b2 = BoundsSpec::scalar(2, -1.0, 1.0).unwrap();
        let v = log_posterior(&[0.0], &b2, eta(1.0), None).unwrap();
        assert!((v + std::f64::consts::LN_2).abs() < 1e-12);
        let b3 = BoundsSpec::scalar(3, -1.0, 1.0).unwrap();
        let v = log_posterior(&[0.0; 3], &b3, eta(1.0), None).unwrap();
        assert!((v + 2.079_441_541_679_835_9).abs() < 1e-12);
    }

    #[test]
    fn log_posterior_propagates_infeasibility() {
        let y0 = ((1.0 - std::f64::consts::FRAC_1_SQRT_2) / std::f64::consts::FRAC_1_SQRT_2).ln();
        let b = BoundsSpec::scalar(3, -1.0, 0.0).unwrap();
        let err = log_posterior(&[y0, y0, 0.0], &b, eta(1.0), None).unwrap_err();
        assert!(matches!(err, Error::DegenerateInterval { .. }));
    }

    #[test]
    fn pinned_posterior_has_fewer_coordinates() {
        let b = BoundsSpec::scalar(3, -1.0, 1.0).unwrap();
        let f = FixedValueSpec::new(3, [(Entry::new(2, 1), 0.0)]).unwrap();
        let v = log_posterior(&[0.0, 0.0], &b, eta(1.0), Some(&f)).unwrap();
        assert!((v - 2.0 * 0.5f64.ln()).abs() < 1e-12);
    }
}
