use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Threshold `x`, exponential tilt `mu` and split point `M = 2 alpha / mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuSchedule<T> {
    pub n: u64,
    pub epsilon: T,
    pub alpha: T,
    pub x: T,
    pub mu: T,
    pub m_split: T,
}

/// `x = n^(max(1/alpha, 1/2) + eps)`, `mu = ln(x^alpha / n) / x`.
pub fn mu_schedule<T: Scalar>(n: u64, epsilon: T, alpha: T) -> Result<MuSchedule<T>> {
    MuSchedule::new(n, epsilon, alpha)
}

impl<T: Scalar> MuSchedule<T> {
    pub fn new(n: u64, epsilon: T, alpha: T) -> Result<Self> {
        Self::check(n, epsilon, alpha)?;
        let e = threshold_exponent(alpha, epsilon);
        let ln_n = T::lit(n as f64).ln();
        let x = (e * ln_n).exp();
        // ln(x^alpha / n) = (alpha e - 1) ln n, written without forming x^alpha
        let mu = (alpha * e - T::one()) * ln_n / x;
        Ok(Self { n, epsilon, alpha, x, mu, m_split: T::lit(2.0) * alpha / mu })
    }

    /// Same threshold, caller-chosen tilt.
    pub fn with_mu(n: u64, epsilon: T, alpha: T, mu: T) -> Result<Self> {
        Self::check(n, epsilon, alpha)?;
        if !(mu.is_finite() && mu > T::zero()) {
            return invalid(format!("mu must be positive, got {mu}"));
        }
        let x = (threshold_exponent(alpha, epsilon) * T::lit(n as f64).ln()).exp();
        Ok(Self { n, epsilon, alpha, x, mu, m_split: T::lit(2.0) * alpha / mu })
    }

    fn check(n: u64, epsilon: T, alpha: T) -> Result<()> {
        if n < 2 {
            return invalid(format!("n must be at least 2, got {n}"));
        }
        if !(epsilon.is_finite() && epsilon > T::zero()) {
            return invalid(format!("epsilon must be positive, got {epsilon}"));
        }
        if !(alpha.is_finite() && alpha > T::zero()) {
            return invalid(format!("alpha must be positive, got {alpha}"));
        }
        Ok(())
    }

    pub fn mu_x(&self) -> T {
        self.mu * self.x
    }

    pub fn n_scalar(&self) -> T {
        T::lit(self.n as f64)
    }
}

/// `max(1/alpha, 1/2) + eps`.
pub fn threshold_exponent<T: Scalar>(alpha: T, epsilon: T) -> T {
    alpha.recip().max(T::lit(0.5)) + epsilon
}
