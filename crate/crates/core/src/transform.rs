//! The bounded Cholesky parameterization.
//!
//! Parameter ordering is part of the public contract: the first `n - 1`
//! coordinates fill column 1 (rows 2..n), the rest fill rows 3..n left to
//! right over columns 2..i-1. Every strict-lower entry `L_ij` depends only on
//! its own coordinate and on entries earlier in this order, so the Jacobian
//! of `x -> strict_lower(L)` is triangular.

use nalgebra::DMatrix;

use crate::bounds::{num_offdiag, row_major_entries, BoundsSpec, Entry, FixedValueSpec};
use crate::error::{Error, Result};
use crate::factor::CholFactor;
use crate::logistic::{lb_ub_forward, lb_ub_inverse, STRICT_SLACK};

/// Output of the forward map.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub factor: CholFactor,
    pub log_abs_det_jacobian: f64,
}

/// Which interval the logistic map targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Map directly into the admissible interval for `L_ij`.
    #[default]
    Standard,
    /// Map into the admissible interval for `L_ij * L_jj` (correlation
    /// scale), divide by `L_jj` afterwards and add `-ln L_jj`.
    Stable,
}

/// Position of entry `(i, j)` in the unconstrained vector.
pub fn param_index(n: usize, e: Entry) -> usize {
    if e.col == 1 {
        e.row - 2
    } else {
        (n - 1) + (e.row - 2) * (e.row - 3) / 2 + (e.col - 2)
    }
}

/// Strict-lower entries in the order the unconstrained vector consumes them.
pub fn consumption_order(n: usize) -> impl Iterator<Item = Entry> {
    (2..=n)
        .map(|i| Entry::new(i, 1))
        .chain((3..=n).flat_map(|i| (2..i).map(move |j| Entry::new(i, j))))
}

/// Interval for `L_ij` given `z = sum_{k<j} L_ik L_jk`, `L_jj`, and the
/// remaining stick length `y` of row `i`:
/// `(max(-y, (a - z) / L_jj), min(y, (b - z) / L_jj))`.
///
/// Intervals narrower than `STRICT_SLACK * y` count as empty. The stick
/// length is the scale of every interval in the row, so saturated rows with
/// tiny but genuine intervals still pass.
pub(crate) fn factor_interval(z: f64, l_jj: f64, stick: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let lb = (-stick).max((a - z) / l_jj);
    let ub = stick.min((b - z) / l_jj);
    if !(ub - lb > STRICT_SLACK * stick) {
        return Err(Error::DegenerateInterval { entry: None, lb, ub });
    }
    Ok((lb, ub))
}

fn dot_prefix(l: &DMatrix<f64>, r: usize, c: usize) -> f64 {
    (0..c).map(|k| l[(r, k)] * l[(c, k)]).sum()
}

/// Admissible interval for `L_ij` given the partially filled factor.
///
/// `partial` must hold rows `1..j` and row `i` columns `1..j-1` (1-based);
/// `stick` is row `i`'s remaining length `sqrt(1 - sum_{k<j} L_ik^2)`.
/// Fails with [`Error::DegenerateInterval`] when no value of `C_ij` inside
/// `(a, b)` is reachable from the entries already fixed.
pub fn entry_bounds(
    partial: &DMatrix<f64>,
    entry: Entry,
    stick: f64,
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    if entry.col < 1 || entry.row <= entry.col || entry.row > partial.nrows() {
        return Err(Error::InvalidBounds(format!("entry {entry} is not strictly lower triangular")));
    }
    let (r, c) = (entry.row - 1, entry.col - 1);
    let z = dot_prefix(partial, r, c);
    factor_interval(z, partial[(c, c)], stick, a, b).map_err(|e| e.at_entry(entry))
}

enum Slot {
    Free(usize),
    Pinned(f64),
}

fn slots(n: usize, fixed: Option<&FixedValueSpec>) -> (Vec<Slot>, usize) {
    // packed row-major index -> slot
    let mut out: Vec<Option<Slot>> = (0..num_offdiag(n)).map(|_| None).collect();
    let mut k = 0;
    for e in consumption_order(n) {
        out[e.packed()] = Some(match fixed.and_then(|f| f.get(e)) {
            Some(p) => Slot::Pinned(p),
            None => {
                k += 1;
                Slot::Free(k - 1)
            }
        });
    }
    (out.into_iter().map(Option::unwrap).collect(), k)
}

fn run(
    x: &[f64],
    bounds: &BoundsSpec,
    fixed: Option<&FixedValueSpec>,
    variant: Variant,
) -> Result<TransformResult> {
    let n = bounds.n();
    if let Some(f) = fixed {
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: f.n() });
        }
    }
    let (slots, free) = slots(n, fixed);
    if x.len() != free {
        return Err(Error::DimensionMismatch { expected: free, actual: x.len() });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("x[{i}] = {}", x[i])));
    }

    let mut l = DMatrix::<f64>::zeros(n, n);
    l[(0, 0)] = 1.0;
    let mut log_jac = 0.0;
    for (e, slot) in row_major_entries(n).zip(&slots) {
        let (r, c) = (e.row - 1, e.col - 1);
        // the stick length of row r is parked on its diagonal until the row is done
        let stick = if c == 0 { 1.0 } else { l[(r, r)] };
        let z = dot_prefix(&l, r, c);
        let l_cc = l[(c, c)];
        let (a, b) = bounds.get(e);

        let value = match *slot {
            Slot::Pinned(p) => {
                let v = (p - z) / l_cc;
                if !(v.abs() < stick * (1.0 - STRICT_SLACK)) {
                    return Err(Error::InfeasiblePin {
                        entry: e,
                        value: p,
                        required: v,
                        lb: -stick,
                        ub: stick,
                    });
                }
                v
            }
            Slot::Free(k) => match variant {
                Variant::Standard => {
                    let (lb, ub) = factor_interval(z, l_cc, stick, a, b).map_err(|err| err.at_entry(e))?;
                    let (v, lj) = lb_ub_forward(x[k], lb, ub).map_err(|err| err.at_entry(e))?;
                    if v <= lb || v >= ub {
                        return Err(Error::Saturated { entry: e });
                    }
                    log_jac += lj;
                    v
                }
                Variant::Stable => {
                    let low = (-stick * l_cc).max(a - z);
                    let up = (stick * l_cc).min(b - z);
                    if !((up - low) / l_cc > STRICT_SLACK * stick) {
                        return Err(Error::DegenerateInterval {
                            entry: Some(e),
                            lb: low / l_cc,
                            ub: up / l_cc,
                        });
                    }
                    let (w, lj) = lb_ub_forward(x[k], low, up).map_err(|err| err.at_entry(e))?;
                    if w <= low || w >= up {
                        return Err(Error::Saturated { entry: e });
                    }
                    log_jac += lj - l_cc.ln();
                    w / l_cc
                }
            },
        };

        l[(r, c)] = value;
        let next = stick * (1.0 - (value / stick).powi(2)).sqrt();
        if !(next > 0.0) {
            return Err(Error::Saturated { entry: e });
        }
        l[(r, r)] = next;
    }

    if !log_jac.is_finite() {
        return Err(Error::NonFinite(format!("log Jacobian {log_jac}")));
    }
    Ok(TransformResult {
        factor: CholFactor::from_raw(l),
        log_abs_det_jacobian: log_jac,
    })
}

/// Map an unconstrained vector of length `n(n-1)/2` to a bounded Cholesky
/// factor and the log absolute Jacobian determinant of `x -> strict_lower(L)`.
pub fn forward(x: &[f64], bounds: &BoundsSpec) -> Result<TransformResult> {
    run(x, bounds, None, Variant::Standard)
}

/// Same map as [`forward`], bounding the correlation-scale quantity
/// `L_ij * L_jj` and dividing afterwards.
pub fn forward_stable(x: &[f64], bounds: &BoundsSpec) -> Result<TransformResult> {
    run(x, bounds, None, Variant::Stable)
}

/// Forward map with the chosen [`Variant`].
pub fn forward_variant(x: &[f64], bounds: &BoundsSpec, variant: Variant) -> Result<TransformResult> {
    run(x, bounds, None, variant)
}

/// Forward map with some correlations pinned. `x` holds only the free
/// coordinates, in consumption order with pinned positions skipped. Pinned
/// entries are set to `(p - z) / L_jj` and add nothing to the Jacobian.
pub fn forward_with_fixed(
    x: &[f64],
    bounds: &BoundsSpec,
    fixed: &FixedValueSpec,
) -> Result<TransformResult> {
    run(x, bounds, Some(fixed), Variant::Standard)
}

/// Recover the unconstrained vector from a factor whose implied correlations
/// all lie inside their bounds.
pub fn inverse(l: &CholFactor, bounds: &BoundsSpec) -> Result<Vec<f64>> {
    inverse_impl(l, bounds, None)
}

/// Inverse of [`forward_with_fixed`]. Pinned positions are checked against
/// their pinned values and skipped.
pub fn inverse_with_fixed(l: &CholFactor, bounds: &BoundsSpec, fixed: &FixedValueSpec) -> Result<Vec<f64>> {
    inverse_impl(l, bounds, Some(fixed))
}

fn inverse_impl(l: &CholFactor, bounds: &BoundsSpec, fixed: Option<&FixedValueSpec>) -> Result<Vec<f64>> {
    let n = bounds.n();
    if l.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: l.n() });
    }
    let m = l.as_matrix();
    let (slots, free) = slots(n, fixed);
    let mut x = vec![0.0; free];
    let mut sticks = vec![1.0; n];
    // walk in consumption order so the first reported failure is the first
    // entry the forward map would have consumed
    for e in consumption_order(n) {
        let (r, c) = (e.row - 1, e.col - 1);
        let z = dot_prefix(m, r, c);
        let value = m[(r, c)];
        // row r's prefix 0..c is already folded into sticks[r]
        let stick = sticks[r];
        match slots[e.packed()] {
            Slot::Pinned(p) => {
                let implied = z + value * m[(c, c)];
                if (implied - p).abs() > 1e-12 {
                    return Err(Error::OutOfBounds { entry: Some(e), value: implied, lb: p, ub: p });
                }
            }
            Slot::Free(k) => {
                let (a, b) = bounds.get(e);
                let (lb, ub) = factor_interval(z, m[(c, c)], stick, a, b).map_err(|_| Error::OutOfBounds {
                    entry: Some(e),
                    value,
                    lb: (a - z) / m[(c, c)],
                    ub: (b - z) / m[(c, c)],
                })?;
                x[k] = lb_ub_inverse(value, lb, ub).map_err(|err| err.at_entry(e))?;
            }
        }
        sticks[r] = stick * (1.0 - (value / stick).powi(2)).sqrt();
    }
    Ok(x)
}

/// `L L^T`, filled from the lower triangle and mirrored so it is exactly
/// symmetric.
pub fn to_correlation(l: &CholFactor) -> DMatrix<f64> {
    let n = l.n();
    let m = l.as_matrix();
    let mut out = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..=r {
            let v: f64 = (0..=c).map(|k| m[(r, k)] * m[(c, k)]).sum();
            out[(r, c)] = v;
            out[(c, r)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn scalar(n: usize, a: f64, b: f64) -> BoundsSpec {
        BoundsSpec::scalar(n, a, b).unwrap()
    }

    #[test]
    fn ordering_contract() {
        let order: Vec<_> = consumption_order(4).map(|e| (e.row, e.col)).collect();
        assert_eq!(order, vec![(2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 3)]);
        for (k, e) in consumption_order(6).enumerate() {
            assert_eq!(param_index(6, e), k);
        }
    }

    #[test]
    fn entry_bounds_impossible_configuration() {
        let mut p = DMatrix::zeros(3, 3);
        p[(0, 0)] = 1.0;
        p[(1, 0)] = -FRAC_1_SQRT_2;
        p[(1, 1)] = (1.0 - 0.5f64).sqrt();
        p[(2, 0)] = -FRAC_1_SQRT_2;
        let stick = (1.0 - p[(2, 0)] * p[(2, 0)]).sqrt();
        let err = entry_bounds(&p, Entry::new(3, 2), stick, -1.0, 0.0).unwrap_err();
        match err {
            Error::DegenerateInterval { entry, lb, ub } => {
                assert_eq!(entry, Some(Entry::new(3, 2)));
                assert!((lb + 0.5f64.sqrt()).abs() < 1e-12);
                assert!((ub + 0.5f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn entry_bounds_zero_first_column() {
        let p = DMatrix::identity(3, 3);
        let (lb, ub) = entry_bounds(&p, Entry::new(3, 2), 1.0, -1.0, 1.0).unwrap();
        assert_eq!((lb, ub), (-1.0, 1.0));
    }

    #[test]
    fn entry_bounds_half_first_column() {
        let mut p = DMatrix::zeros(3, 3);
        p[(0, 0)] = 1.0;
        p[(1, 0)] = 0.5;
        p[(1, 1)] = 0.75f64.sqrt();
        p[(2, 0)] = 0.5;
        let (lb, ub) = entry_bounds(&p, Entry::new(3, 2), 0.75f64.sqrt(), -1.0, 1.0).unwrap();
        assert!((lb + 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!((ub - 0.866_025_403_784_438_6).abs() < 1e-12);
        // implied C_32 range = z + L22 * (lb, ub) = (-0.5, 1.0), inside [-1, 1]
        let l22 = p[(1, 1)];
        assert!((0.25 + l22 * lb + 0.5).abs() < 1e-12);
        assert!((0.25 + l22 * ub - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_case() {
        let r = forward(&[0.0; 3], &scalar(3, -1.0, 1.0)).unwrap();
        assert_eq!(r.factor, CholFactor::identity(3));
        assert!((r.log_abs_det_jacobian + 2.079_441_541_679_835_9).abs() < 1e-12);
        let s = forward_stable(&[0.0; 3], &scalar(3, -1.0, 1.0)).unwrap();
        assert_eq!(s, r);
    }

    #[test]
    fn impossible_bounds_via_forward() {
        // column-1 coordinate giving C_21 = C_31 = -1/sqrt(2) under bounds (-1, 0)
        let y0 = ((1.0 - FRAC_1_SQRT_2) / FRAC_1_SQRT_2).ln();
        assert!((y0 + 0.881_373_587_019_543).abs() < 1e-12);
        let b = scalar(3, -1.0, 0.0);
        for third in [-3.0, 0.0, 5.0] {
            for f in [forward, forward_stable] {
                let err = f(&[y0, y0, third], &b).unwrap_err();
                assert!(matches!(err, Error::DegenerateInterval { entry: Some(e), .. } if e == Entry::new(3, 2)), "{err:?}");
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let b = scalar(3, -1.0, 1.0);
        assert_eq!(
            forward(&[0.0; 2], &b).unwrap_err(),
            Error::DimensionMismatch { expected: 3, actual: 2 }
        );
        assert!(matches!(forward(&[0.0, f64::INFINITY, 0.0], &b), Err(Error::NonFinite(_))));
    }

    #[test]
    fn saturated_stick_is_reported() {
        let err = forward(&[800.0], &scalar(2, -1.0, 1.0)).unwrap_err();
        assert_eq!(err, Error::Saturated { entry: Entry::new(2, 1) });
    }

    #[test]
    fn inverse_identity() {
        assert_eq!(inverse(&CholFactor::identity(3), &scalar(3, -1.0, 1.0)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn inverse_out_of_bounds() {
        let l = CholFactor::from_lower_row_major(2, &[1.0, 0.5, 0.75f64.sqrt()]).unwrap();
        let err = inverse(&l, &scalar(2, -1.0, 0.0)).unwrap_err();
        assert_eq!(err.entry(), Some(Entry::new(2, 1)));
        assert!(matches!(err, Error::OutOfBounds { .. }));
    }

    #[test]
    fn inverse_dimension_mismatch() {
        let err = inverse(&CholFactor::identity(4), &scalar(3, -1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn pin_first_column_zero() {
        let fixed = FixedValueSpec::new(3, [(Entry::new(2, 1), 0.0)]).unwrap();
        let r = forward_with_fixed(&[0.4, -0.7], &scalar(3, -1.0, 1.0), &fixed).unwrap();
        assert_eq!(r.factor.at(2, 1), 0.0);
        assert!(forward_with_fixed(&[0.0; 3], &scalar(3, -1.0, 1.0), &fixed).is_err());
        let x = inverse_with_fixed(&r.factor, &scalar(3, -1.0, 1.0), &fixed).unwrap();
        assert!((x[0] - 0.4).abs() < 1e-12 && (x[1] + 0.7).abs() < 1e-12);
    }

    #[test]
    fn pin_inner_entry_exact() {
        let fixed = FixedValueSpec::new(3, [(Entry::new(3, 2), -0.2)]).unwrap();
        for x in [[0.0, 0.0], [1.3, -0.4], [-0.5, 0.7]] {
            let r = forward_with_fixed(&x, &scalar(3, -1.0, 1.0), &fixed).unwrap();
            let c = to_correlation(&r.factor);
            assert!((c[(2, 1)] + 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_pin() {
        let p = -FRAC_1_SQRT_2;
        let fixed = FixedValueSpec::new(
            3,
            [(Entry::new(2, 1), p), (Entry::new(3, 1), p), (Entry::new(3, 2), -0.1)],
        );
        // three pins leave no free parameter for n = 3
        assert!(fixed.is_err());
        let fixed = FixedValueSpec::new(4, [(Entry::new(2, 1), p), (Entry::new(3, 1), p), (Entry::new(3, 2), -0.1)]).unwrap();
        let err = forward_with_fixed(&[0.0; 3], &scalar(4, -1.0, 1.0), &fixed).unwrap_err();
        assert!(matches!(err, Error::InfeasiblePin { entry, .. } if entry == Entry::new(3, 2)), "{err:?}");
    }

    #[test]
    fn to_correlation_examples() {
        assert_eq!(to_correlation(&CholFactor::identity(3)), DMatrix::identity(3, 3));
        let r = 0.37;
        let l = CholFactor::from_lower_row_major(2, &[1.0, r, (1.0 - r * r).sqrt()]).unwrap();
        let c = to_correlation(&l);
        assert_eq!(c[(1, 0)], r);
        assert_eq!(c[(0, 1)], r);
        assert!((c[(1, 1)] - 1.0).abs() < 1e-15);
    }
}
