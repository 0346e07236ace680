use crate::distributions::IntegerDistribution;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Largest `mu x` for which `e^(mu k)` stays representable in `f64`.
pub(crate) const MAX_MU_X: f64 = 700.0;
/// Largest threshold addressable with `i64` summation indices.
pub(crate) const MAX_X: f64 = 4.6e18;

/// `R(mu, x) = sum_{k <= floor(x)} e^(mu k) P[X = k]`.
pub fn truncated_mgf<T: Scalar>(dist: &IntegerDistribution<T>, mu: T, x: T) -> Result<T> {
    if !(mu.is_finite() && mu > T::zero()) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    let top = check_scale(mu, x)?;
    dist.exp_weighted_sum(mu, None, Some(top))
}

/// Validates `(mu, x)` and returns `floor(x)`.
pub(crate) fn check_scale<T: Scalar>(mu: T, x: T) -> Result<i64> {
    if !x.is_finite() || x.as_f64() > MAX_X {
        return Err(Error::UnsupportedScale(format!("threshold {x} exceeds the integer range")));
    }
    if (mu * x).as_f64() > MAX_MU_X {
        return Err(Error::UnsupportedScale(format!("mu x = {} exceeds {MAX_MU_X}", mu * x)));
    }
    Ok(x.floor().as_f64() as i64)
}
