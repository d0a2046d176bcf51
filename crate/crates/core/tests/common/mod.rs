#![allow(dead_code)]

use corrchol::{BoundsSpec, CholFactor};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Scalar bound pairs `a < b` from `{-1, -0.5, 0} x {0, 0.5, 1}`.
pub const BOUND_GRID: [(f64, f64); 8] = [
    (-1.0, 0.0),
    (-1.0, 0.5),
    (-1.0, 1.0),
    (-0.5, 0.0),
    (-0.5, 0.5),
    (-0.5, 1.0),
    (0.0, 0.5),
    (0.0, 1.0),
];

pub fn random_bounds<R: Rng>(rng: &mut R, n: usize) -> BoundsSpec {
    let (a, b) = BOUND_GRID[rng.random_range(0..BOUND_GRID.len())];
    BoundsSpec::scalar(n, a, b).unwrap()
}

pub fn random_x<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Vec<f64> {
    (0..n * (n - 1) / 2).map(|_| rng.random_range(-half_width..half_width)).collect()
}

/// Checks every factor invariant directly on the matrix.
pub fn assert_factor_invariants(l: &CholFactor) {
    let m = l.as_matrix();
    let n = m.nrows();
    assert_eq!(m[(0, 0)], 1.0);
    for r in 0..n {
        assert!(m[(r, r)] > 0.0, "diagonal {r}");
        let norm2: f64 = (0..=r).map(|c| m[(r, c)].powi(2)).sum();
        assert!((norm2 - 1.0).abs() < 1e-12, "row {r} norm^2 {norm2}");
        for c in 0..r {
            assert!(m[(r, c)].abs() < 1.0);
        }
        for c in r + 1..n {
            assert_eq!(m[(r, c)], 0.0);
        }
    }
}

pub fn min_eigenvalue(c: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(c.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_positive_definite(c: &DMatrix<f64>) -> bool {
    nalgebra::Cholesky::new(c.clone()).is_some() && min_eigenvalue(c) > 0.0
}
