//! Bounded Cholesky-factor parameterization of correlation matrices.
//!
//! The transform maps an unconstrained real vector of length `n(n-1)/2` onto
//! the lower Cholesky factor `L` of an `n x n` correlation matrix whose
//! off-diagonal entries each lie inside a user-supplied interval `(a_ij, b_ij)`.
//! Every strict-lower entry of `L` is produced by a scaled logistic map into
//! the interval left open by the entries computed before it, so the Jacobian
//! is triangular and its log-determinant is a plain sum.
//!
//! Modules:
//! - [`transform`]: forward / inverse maps, per-entry bounds, pinned values.
//! - [`density`]: LKJ kernel on the Cholesky factor and the unconstrained log posterior.
//! - [`sampler`]: adaptive random-walk Metropolis over the unconstrained vector.
//! - [`oracle`]: brute-force verifiers (finite differences, rejection sampling).
//! - [`io`]: text formats used by the command-line tool.

// `!(a < b)` is deliberate throughout: NaN has to fail interior checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod density;
pub mod error;
pub mod factor;
pub mod io;
pub mod logistic;
pub mod oracle;
pub mod sampler;
pub mod transform;

pub use bounds::{BoundsSpec, Entry, FixedValueSpec};
pub use density::{lkj_cholesky_logpdf, log_posterior, LkjShape};
pub use error::{Error, Result};
pub use factor::CholFactor;
pub use logistic::{lb_ub_forward, lb_ub_inverse};
pub use sampler::{run_chain, summarize, ChainOutput, ChainSummary, SamplerConfig};
pub use transform::{
    entry_bounds, forward, forward_stable, forward_with_fixed, inverse, to_correlation,
    TransformResult, Variant,
};
