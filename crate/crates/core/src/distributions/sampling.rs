use rand::Rng;

use super::{DistKind, IntegerDistribution};
use crate::scalar::Scalar;

/// Largest magnitude a closed-form guess is trusted at before falling back to
/// the unchecked float value.
const EXACT_CHECK_LIMIT: f64 = 4.5e15;

impl<T: Scalar> IntegerDistribution<T> {
    /// Smallest `k` with `P[X <= k] >= 1 - u`, equivalently the largest `k`
    /// with `P[X >= k] >= u`, for `u` in `(0, 1]`.
    pub fn quantile(&self, u: T) -> i128 {
        let u = u.max(T::min_positive_value()).min(T::one());
        match &self.kind {
            DistKind::PointMass { c } => *c as i128,
            DistKind::ExactTailPareto { alpha, v } => {
                if u > *v {
                    return 0;
                }
                let guess = (*v / u).powf(alpha.recip()).floor();
                self.refine(guess, u)
            }
            DistKind::Geometric { p } => {
                let guess = T::one() + (u.ln() / (T::one() - *p).ln()).floor();
                self.refine(guess, u)
            }
            DistKind::TwoSidedMixture { .. } => self.bisect_quantile(u),
        }
    }

    /// Maps one uniform on `(0, 1]` to a draw of the law. Mixtures split `u`
    /// between components, which is exact in law but not monotone in `u`.
    pub fn sample_from_uniform(&self, u: T) -> i128 {
        match &self.kind {
            DistKind::TwoSidedMixture { right, left, p_right } => {
                if u <= *p_right {
                    right.sample_from_uniform((u / *p_right).min(T::one()))
                } else {
                    let rest = ((u - *p_right) / (T::one() - *p_right)).min(T::one());
                    -left.sample_from_uniform(rest)
                }
            }
            _ => self.quantile(u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i128 {
        let u = 1.0 - rng.gen::<f64>();
        self.sample_from_uniform(T::lit(u))
    }

    /// Corrects a closed-form guess by at most a few steps using exact tails.
    fn refine(&self, guess: T, u: T) -> i128 {
        let g = guess.as_f64();
        if !(g < EXACT_CHECK_LIMIT) {
            return if g.is_finite() { g as i128 } else { i128::MAX };
        }
        let mut k = (g as i64).max(0);
        while k > 0 && self.prob_at_least(k) < u {
            k -= 1;
        }
        while self.prob_at_least(k + 1) >= u {
            k += 1;
        }
        k as i128
    }

    /// Largest `k` with `P[X >= k] >= u`, found by doubling and bisection.
    fn bisect_quantile(&self, u: T) -> i128 {
        let limit = 1i64 << 60;
        let mut lo = 0i64;
        while self.prob_at_least(lo) < u && lo > -limit {
            lo = lo * 2 - 1;
        }
        let mut hi = 1i64;
        while self.prob_at_least(hi) >= u && hi < limit {
            hi *= 2;
        }
        if hi >= limit {
            return hi as i128;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.prob_at_least(mid) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo as i128
    }
}
