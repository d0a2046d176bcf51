//! Per-entry correlation bounds and pinned correlation values.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Position of a strict-lower-triangular entry, 1-based with `row > col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
}

impl Entry {
    pub const fn new(row: usize, col: usize) -> Self {
        Entry { row, col }
    }

    /// Row-major packed index over the strict lower triangle.
    pub(crate) fn packed(self) -> usize {
        (self.row - 1) * (self.row - 2) / 2 + (self.col - 1)
    }

    fn check(self, n: usize) -> Result<()> {
        if self.col >= 1 && self.row > self.col && self.row <= n {
            Ok(())
        } else {
            Err(Error::InvalidBounds(format!(
                "entry {self} is not strictly lower triangular for n = {n}"
            )))
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Number of strict-lower entries of an `n x n` matrix.
pub const fn num_offdiag(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Strict-lower entries in row-major order: (2,1), (3,1), (3,2), (4,1), ...
pub fn row_major_entries(n: usize) -> impl Iterator<Item = Entry> {
    (2..=n).flat_map(|i| (1..i).map(move |j| Entry::new(i, j)))
}

/// Correlation bounds `a_ij < C_ij < b_ij` for every strict-lower entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsSpec {
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundsSpec {
    /// Broadcast a single `(lb, ub)` pair to every entry.
    pub fn scalar(n: usize, lb: f64, ub: f64) -> Result<Self> {
        Self::with_overrides(n, (lb, ub), std::iter::empty())
    }

    /// Start from a default pair and override individual entries.
    pub fn with_overrides(
        n: usize,
        default: (f64, f64),
        overrides: impl IntoIterator<Item = (Entry, f64, f64)>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBounds(format!("dimension must be >= 2, got {n}")));
        }
        let m = num_offdiag(n);
        let mut lower = vec![default.0; m];
        let mut upper = vec![default.1; m];
        for (e, lb, ub) in overrides {
            e.check(n)?;
            lower[e.packed()] = lb;
            upper[e.packed()] = ub;
        }
        for (e, (&a, &b)) in row_major_entries(n).zip(lower.iter().zip(&upper)) {
            check_pair(a, b).map_err(|msg| Error::InvalidBounds(format!("{e}: {msg}")))?;
        }
        Ok(BoundsSpec { n, lower, upper })
    }

    /// Build from a closure evaluated at every strict-lower entry.
    pub fn from_fn(n: usize, mut f: impl FnMut(Entry) -> (f64, f64)) -> Result<Self> {
        let overrides: Vec<_> = row_major_entries(n)
            .map(|e| {
                let (a, b) = f(e);
                (e, a, b)
            })
            .collect();
        Self::with_overrides(n, (-1.0, 1.0), overrides)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(a_ij, b_ij)` for the given entry.
    ///
    /// Panics if the entry is not strictly lower triangular for this dimension.
    pub fn get(&self, e: Entry) -> (f64, f64) {
        assert!(e.row <= self.n && e.row > e.col && e.col >= 1, "entry {e} out of range");
        let k = e.packed();
        (self.lower[k], self.upper[k])
    }

    pub fn contains(&self, e: Entry, value: f64) -> bool {
        let (a, b) = self.get(e);
        a < value && value < b
    }
}

fn check_pair(a: f64, b: f64) -> std::result::Result<(), String> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(format!("bounds must be finite, got ({a}, {b})"));
    }
    if a < -1.0 || b > 1.0 {
        return Err(format!("bounds ({a}, {b}) leave [-1, 1]"));
    }
    if a >= b {
        return Err(format!(
            "lower bound {a} must be below upper bound {b}; use a pin to fix a value"
        ));
    }
    Ok(())
}

/// Correlations pinned to known constants. Pinned entries consume no
/// unconstrained coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedValueSpec {
    n: usize,
    pins: BTreeMap<Entry, f64>,
}

impl FixedValueSpec {
    pub fn new(n: usize, pins: impl IntoIterator<Item = (Entry, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, p) in pins {
            e.check(n).map_err(|err| Error::InvalidPins(err.to_string()))?;
            if !(p.is_finite() && p > -1.0 && p < 1.0) {
                return Err(Error::InvalidPins(format!("pin {e} = {p} is not inside (-1, 1)")));
            }
            if map.insert(e, p).is_some() {
                return Err(Error::InvalidPins(format!("duplicate pin at {e}")));
            }
        }
        if map.len() >= num_offdiag(n) {
            return Err(Error::InvalidPins(format!(
                "{} pins leave no free parameters for n = {n}",
                map.len()
            )));
        }
        Ok(FixedValueSpec { n, pins: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    pub fn get(&self, e: Entry) -> Option<f64> {
        self.pins.get(&e).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Entry, f64)> + '_ {
        self.pins.iter().map(|(&e, &p)| (e, p))
    }
}
