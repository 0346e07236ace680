use serde::{Deserialize, Serialize};

use crate::distributions::IntegerDistribution;
use crate::scalar::{CompensatedSum, Scalar};

/// Both sides of the summation-by-parts identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub diff: T,
}

/// Evaluates
/// `sum_{d=a}^{b} f(d) P[X=d]` and
/// `f(a) P[X>=a] - f(b) P[X>=b+1] + sum_{d=a+1}^{b} (f(d) - f(d-1)) P[X>=d]`.
pub fn summation_by_parts_check<T: Scalar>(
    dist: &IntegerDistribution<T>,
    f: impl Fn(i64) -> T,
    a: i64,
    b: i64,
) -> IdentityReport<T> {
    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    rhs.add(f(a) * dist.prob_at_least(a));
    rhs.add(-f(b) * dist.prob_at_least(b + 1));
    let mut prev = f(a);
    lhs.add(prev * dist.pmf(a));
    for d in a + 1..=b {
        let cur = f(d);
        lhs.add(cur * dist.pmf(d));
        rhs.add((cur - prev) * dist.prob_at_least(d));
        prev = cur;
    }
    let (lhs, rhs) = (lhs.value(), rhs.value());
    IdentityReport { lhs, rhs, diff: (lhs - rhs).abs() }
}
