use thiserror::Error;

use crate::bounds::Entry;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The admissible interval for an entry is empty (`lb >= ub`).
    #[error("degenerate interval{}: lower {lb} >= upper {ub}", at(.entry))]
    DegenerateInterval {
        entry: Option<Entry>,
        lb: f64,
        ub: f64,
    },

    /// A value lies on or outside the admissible open interval.
    #[error("value {value} out of bounds ({lb}, {ub}){}", at(.entry))]
    OutOfBounds {
        entry: Option<Entry>,
        value: f64,
        lb: f64,
        ub: f64,
    },

    /// A pinned correlation cannot be realized given the entries before it.
    #[error("infeasible pin at {entry}: value {value} needs factor entry {required} outside ({lb}, {ub})")]
    InfeasiblePin {
        entry: Entry,
        value: f64,
        required: f64,
        lb: f64,
        ub: f64,
    },

    /// The logistic map hit an interval endpoint in floating point.
    #[error("saturated transform at {entry}: mapped value reached an interval endpoint")]
    Saturated { entry: Entry },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid Cholesky factor: {0}")]
    InvalidFactor(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid pins: {0}")]
    InvalidPins(String),

    #[error("LKJ shape must be finite and positive, got {0}")]
    NonPositiveEta(f64),

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("log posterior undefined at the initial point: {0}")]
    InfeasibleAtInit(Box<Error>),

    #[error("chain has {0} draws, at least 2 are required")]
    EmptyChain(usize),

    #[error("finite-difference perturbation left the feasible set: {0}")]
    PerturbationInfeasible(Box<Error>),

    #[error("rejection sampler acceptance {0:e} is below 1e-4")]
    AcceptanceTooLow(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

fn at(entry: &Option<Entry>) -> String {
    match entry {
        Some(e) => format!(" at {e}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach an entry position to a positional error raised by a scalar helper.
    pub(crate) fn at_entry(self, e: Entry) -> Self {
        match self {
            Error::DegenerateInterval { lb, ub, .. } => Error::DegenerateInterval {
                entry: Some(e),
                lb,
                ub,
            },
            Error::OutOfBounds { value, lb, ub, .. } => Error::OutOfBounds {
                entry: Some(e),
                value,
                lb,
                ub,
            },
            other => other,
        }
    }

    /// Entry that caused the failure, when the error carries one.
    pub fn entry(&self) -> Option<Entry> {
        match self {
            Error::DegenerateInterval { entry, .. } | Error::OutOfBounds { entry, .. } => *entry,
            Error::InfeasiblePin { entry, .. } | Error::Saturated { entry } => Some(*entry),
            Error::InfeasibleAtInit(inner) | Error::PerturbationInfeasible(inner) => inner.entry(),
            _ => None,
        }
    }

    /// True for errors meaning "this point lies outside the feasible set",
    /// as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInterval { .. }
                | Error::InfeasiblePin { .. }
                | Error::Saturated { .. }
                | Error::OutOfBounds { .. }
                | Error::InfeasibleAtInit(_)
                | Error::PerturbationInfeasible(_)
        )
    }
}
