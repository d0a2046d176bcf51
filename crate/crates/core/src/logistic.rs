//! Scaled and shifted logistic map from the real line onto an open interval.

use crate::error::{Error, Result};

/// Relative slack applied to strict-interior checks.
pub const STRICT_SLACK: f64 = 1e-14;

/// `ln(1 + e^t)` without overflow.
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `ln sigma(y)`; stays finite for any finite `y`.
pub fn log_sigmoid(y: f64) -> f64 {
    -softplus(-y)
}

pub fn sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// Map `y` into `(lb, ub)` via `lb + (ub - lb) * sigma(y)`.
///
/// Returns the mapped value and `ln(ub - lb) + ln sigma(y) + ln(1 - sigma(y))`,
/// the log-derivative of the map. The value is computed from the nearer
/// endpoint so that it keeps full relative precision in the tails; for
/// `|y|` beyond about 37 it can round onto the endpoint itself.
pub fn lb_ub_forward(y: f64, lb: f64, ub: f64) -> Result<(f64, f64)> {
    if !y.is_finite() {
        return Err(Error::NonFinite(format!("unconstrained value {y}")));
    }
    if !(lb.is_finite() && ub.is_finite()) {
        return Err(Error::NonFinite(format!("interval ({lb}, {ub})")));
    }
    if lb >= ub {
        return Err(Error::DegenerateInterval { entry: None, lb, ub });
    }
    let width = ub - lb;
    let x = if y >= 0.0 {
        ub - width * sigmoid(-y)
    } else {
        lb + width * sigmoid(y)
    };
    let log_jac = width.ln() + log_sigmoid(y) + log_sigmoid(-y);
    Ok((x, log_jac))
}

/// Inverse of [`lb_ub_forward`]: `logit((x - lb) / (ub - lb))`.
///
/// `x` must sit at least `STRICT_SLACK * (ub - lb)` inside the interval.
pub fn lb_ub_inverse(x: f64, lb: f64, ub: f64) -> Result<f64> {
    if !(x.is_finite() && lb.is_finite() && ub.is_finite()) {
        return Err(Error::NonFinite(format!("value {x} in ({lb}, {ub})")));
    }
    let margin = STRICT_SLACK * (ub - lb);
    if !(x - lb > margin && ub - x > margin) {
        return Err(Error::OutOfBounds { entry: None, value: x, lb, ub });
    }
    Ok(((x - lb) / (ub - x)).ln())
}
