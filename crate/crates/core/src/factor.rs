use nalgebra::DMatrix;

use crate::bounds::{row_major_entries, Entry};
use crate::error::{Error, Result};

/// Tolerance on `|sum_k L_ik^2 - 1|` when validating a factor.
pub const ROW_NORM_TOL: f64 = 1e-12;

/// Lower Cholesky factor of a correlation matrix: lower triangular, positive
/// diagonal, unit-norm rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor(DMatrix<f64>);

impl CholFactor {
    /// Validate and wrap a matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        validate(&m)?;
        Ok(CholFactor(m))
    }

    pub fn identity(n: usize) -> Self {
        CholFactor(DMatrix::identity(n, n))
    }

    /// Build from the lower triangle given row by row, diagonal included:
    /// `L11, L21, L22, L31, L32, L33, ...`.
    pub fn from_lower_row_major(n: usize, values: &[f64]) -> Result<Self> {
        let expected = n * (n + 1) / 2;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        let mut it = values.iter();
        for r in 0..n {
            for c in 0..=r {
                m[(r, c)] = *it.next().unwrap();
            }
        }
        Self::new(m)
    }

    pub(crate) fn from_raw(m: DMatrix<f64>) -> Self {
        debug_assert!(validate(&m).is_ok(), "{:?}", validate(&m));
        CholFactor(m)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Entry `L_ij` with 1-based indices.
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.0[(row - 1, col - 1)]
    }

    /// Lower triangle including the diagonal, row by row.
    pub fn lower_row_major(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).flat_map(|r| (0..=r).map(move |c| (r, c))).map(|rc| self.0[rc]).collect()
    }

    /// Strict-lower entries in row-major order.
    pub fn strict_lower(&self) -> Vec<f64> {
        row_major_entries(self.n()).map(|e| self.at(e.row, e.col)).collect()
    }
}

fn validate(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::InvalidFactor(format!("matrix must be square and non-empty, got {}x{}", n, m.ncols())));
    }
    if let Some(v) = m.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidFactor(format!("non-finite entry {v}")));
    }
    for r in 0..n {
        for c in r + 1..n {
            if m[(r, c)] != 0.0 {
                return Err(Error::InvalidFactor(format!(
                    "upper-triangular entry ({}, {}) is {}",
                    r + 1,
                    c + 1,
                    m[(r, c)]
                )));
            }
        }
        if m[(r, r)] <= 0.0 {
            return Err(Error::InvalidFactor(format!("diagonal entry {} is {}", r + 1, m[(r, r)])));
        }
        let norm2: f64 = (0..=r).map(|c| m[(r, c)] * m[(r, c)]).sum();
        if (norm2 - 1.0).abs() > ROW_NORM_TOL {
            return Err(Error::InvalidFactor(format!("row {} has squared norm {norm2}", r + 1)));
        }
        for c in 0..r {
            if m[(r, c)].abs() >= 1.0 {
                return Err(Error::InvalidFactor(format!(
                    "entry {} has magnitude >= 1",
                    Entry::new(r + 1, c + 1)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_valid() {
        for n in 1..6 {
            assert!(CholFactor::new(DMatrix::identity(n, n)).is_ok());
        }
    }

    #[test]
    fn rejects_invalid() {
        // non-unit row
        assert!(CholFactor::from_lower_row_major(2, &[1.0, 0.5, 0.5]).is_err());
        // negative diagonal
        assert!(CholFactor::from_lower_row_major(2, &[1.0, 0.6, -0.8]).is_err());
        // upper entry
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 0.1;
        assert!(CholFactor::new(m).is_err());
        // wrong length
        assert!(matches!(
            CholFactor::from_lower_row_major(2, &[1.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn layout_round_trip() {
        let l = CholFactor::from_lower_row_major(3, &[1.0, 0.6, 0.8, 0.8, 0.0, 0.6]).unwrap();
        assert_eq!(l.at(3, 1), 0.8);
        assert_eq!(l.strict_lower(), vec![0.6, 0.8, 0.0]);
        assert_eq!(l.lower_row_major(), vec![1.0, 0.6, 0.8, 0.8, 0.0, 0.6]);
    }
}
