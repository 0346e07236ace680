use serde::{Deserialize, Serialize};

use super::mgf::check_scale;
use super::schedule::MuSchedule;
use crate::distributions::IntegerDistribution;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tail_model::{RegimeTag, TailClassSpec};

/// Exact segment sums of the truncated MGF over `(-inf, 0]`, `[1, floor(M)]`
/// and `[floor(M)+1, floor(x)]`, with their explicit-constant upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalDecomposition<T> {
    pub i1: T,
    pub i2: T,
    pub i3: T,
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub regime: RegimeTag,
}

impl<T: Scalar> IntervalDecomposition<T> {
    pub fn exact_total(&self) -> T {
        self.i1 + self.i2 + self.i3
    }

    pub fn exact(&self) -> [T; 3] {
        [self.i1, self.i2, self.i3]
    }

    pub fn bounds(&self) -> [T; 3] {
        [self.b1, self.b2, self.b3]
    }

    /// `b_j - i_j` for each segment.
    pub fn margins(&self) -> [T; 3] {
        [self.b1 - self.i1, self.b2 - self.i2, self.b3 - self.i3]
    }
}

/// Splits `R(mu, x)` at `0` and `M` and evaluates the lemma bounds.
///
/// The regime follows `schedule.alpha`: at most 1 uses the right tail only,
/// above 1 needs both tails and a finite mean. `schedule.alpha` may be smaller
/// than the certified exponents, never larger.
pub fn interval_decomposition<T: Scalar>(
    dist: &IntegerDistribution<T>,
    schedule: &MuSchedule<T>,
    spec: &TailClassSpec<T>,
) -> Result<IntervalDecomposition<T>> {
    let (alpha, mu, x, m) = (schedule.alpha, schedule.mu, schedule.x, schedule.m_split);
    if !(mu < T::one()) {
        return Err(Error::InvalidSchedule(format!("mu = {mu} is not below 1")));
    }
    if !(m < x) {
        return Err(Error::InvalidSchedule(format!("split M = {m} is not below x = {x}")));
    }
    let top = check_scale(mu, x)?;
    let m_floor = m.floor().as_f64() as i64;
    let regime = RegimeTag::of_exponent(alpha);

    let i1 = dist.exp_weighted_sum(mu, None, Some(0))?;
    let i2 = dist.exp_weighted_sum(mu, Some(1), Some(m_floor))?;
    let i3 = dist.exp_weighted_sum(mu, Some(m_floor + 1), Some(top))?;

    let v = spec.v();
    let p_nonpos = dist.prob_at_most(0);
    let p_pos = dist.prob_at_least(1);
    let b3 = ceiling_term(alpha, v, mu) + v * (mu * x).exp() * x.powf(-alpha);

    let (b1, b2) = match regime {
        RegimeTag::SubLinear => {
            if alpha > spec.alpha_r() {
                return Err(Error::WrongRegime(format!(
                    "schedule alpha {alpha} exceeds certified alpha_r {}",
                    spec.alpha_r()
                )));
            }
            (p_nonpos, p_pos + T::lit(2.0) * mu + v * (T::lit(2.0) * alpha).exp() * i2_integral(alpha, mu))
        }
        RegimeTag::Concentrated => {
            let w = spec
                .w()
                .ok_or_else(|| Error::WrongRegime("alpha > 1 needs the left tail certified".into()))?;
            if alpha > spec.min_alpha() {
                return Err(Error::WrongRegime(format!(
                    "schedule alpha {alpha} exceeds certified min alpha {}",
                    spec.min_alpha()
                )));
            }
            let (right_sum, left_sum) = match (dist.right_tail_sum(), dist.left_tail_sum()) {
                (Some(r), Some(l)) => (r, l),
                _ => return Err(Error::WrongRegime("alpha > 1 needs a finite mean".into())),
            };
            (
                p_nonpos - mu * left_sum + left_remainder(alpha, w, mu),
                p_pos + mu * right_sum + centered_middle(alpha, v, mu),
            )
        }
    };
    Ok(IntervalDecomposition { i1, i2, i3, b1, b2, b3, regime })
}

/// `T_0(alpha, mu)` for `alpha <= 1`: every term of the bound on `R(mu, x)`
/// beyond `1 + V e^(mu x) x^-alpha`.
pub fn t0_term<T: Scalar>(alpha: T, v: T, mu: T) -> Result<T> {
    if alpha > T::one() {
        return Err(Error::WrongRegime(format!("T_0 needs alpha <= 1, got {alpha}")));
    }
    let two = T::lit(2.0);
    Ok(two * mu + v * (two * alpha).exp() * i2_integral(alpha, mu) + ceiling_term(alpha, v, mu))
}

/// `T(alpha, mu)` for `alpha > 1`: every term of the bound on `R(mu, x)`
/// beyond `1 + mu E X + V e^(mu x) x^-alpha`.
pub fn tau_term<T: Scalar>(alpha: T, v: T, w: T, mu: T) -> Result<T> {
    if alpha <= T::one() {
        return Err(Error::WrongRegime(format!("the centered remainder needs alpha > 1, got {alpha}")));
    }
    Ok(left_remainder(alpha, w, mu) + centered_middle(alpha, v, mu) + ceiling_term(alpha, v, mu))
}

/// `V e^(3 alpha) (2 alpha)^-alpha mu^alpha`, the boundary term at `ceil(M)`.
fn ceiling_term<T: Scalar>(alpha: T, v: T, mu: T) -> T {
    let two_alpha = T::lit(2.0) * alpha;
    v * (T::lit(3.0) * alpha).exp() * two_alpha.powf(-alpha) * mu.powf(alpha)
}

/// `mu * int_1^M t^-alpha dt`, bounded in closed form.
fn i2_integral<T: Scalar>(alpha: T, mu: T) -> T {
    if alpha < T::one() {
        let one_minus = T::one() - alpha;
        (T::lit(2.0) * alpha).powf(one_minus) / one_minus * mu.powf(alpha)
    } else {
        mu * T::lit(2.0).ln() - mu * mu.ln()
    }
}

/// `W (mu^2 + mu^(alpha+1) + mu^alpha / (alpha-1) + sigma(alpha, mu))`.
fn left_remainder<T: Scalar>(alpha: T, w: T, mu: T) -> T {
    let two = T::lit(2.0);
    let mu2 = mu * mu;
    let sigma = if alpha < two {
        mu2 * (mu.powf(alpha - two) - T::one()) / (two - alpha)
    } else if alpha == two {
        -mu2 * mu.ln()
    } else {
        mu2 * (T::one() - mu.powf(alpha - two)) / (alpha - two)
    };
    w * (mu2 + mu.powf(alpha + T::one()) + mu.powf(alpha) / (alpha - T::one()) + sigma)
}

/// `2 V mu^2 + V e^(2 alpha) mu^2 (1 + int_1^M t^(1-alpha) dt)`; the `1` is
/// the `k = 1` term of `sum_{k=1}^{floor M} k^(1-alpha)`.
fn centered_middle<T: Scalar>(alpha: T, v: T, mu: T) -> T {
    let two = T::lit(2.0);
    let mu2 = mu * mu;
    let m = two * alpha / mu;
    let integral = if alpha < two {
        (m.powf(two - alpha) - T::one()) / (two - alpha)
    } else if alpha == two {
        m.ln()
    } else {
        (T::one() - m.powf(two - alpha)) / (alpha - two)
    };
    two * v * mu2 + v * (two * alpha).exp() * mu2 * (T::one() + integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::{mu_schedule, truncated_mgf};

    type D = IntegerDistribution<f64>;

    fn check(dist: &D, n: u64, eps: f64) -> IntervalDecomposition<f64> {
        let spec = dist.certified();
        let alpha = if spec.min_alpha() > 1.0 { spec.min_alpha() } else { spec.alpha_r() };
        let s = mu_schedule(n, eps, alpha).unwrap();
        let d = interval_decomposition(dist, &s, spec).unwrap();
        let total = truncated_mgf(dist, s.mu, s.x).unwrap();
        assert!((d.exact_total() - total).abs() <= 1e-10 * total.max(1.0), "{d:?} vs {total}");
        for (j, margin) in d.margins().iter().enumerate() {
            assert!(*margin >= -1e-10, "segment {} of {}: {d:?}", j + 1, dist.label());
        }
        d
    }

    #[test]
    fn point_mass_at_zero() {
        let d = check(&D::point_mass(0).with_certificate_exponent(0.8).unwrap(), 10_000, 0.4);
        assert_eq!(d.exact(), [1.0, 0.0, 0.0]);
        assert!(d.b1 >= 1.0);
    }

    #[test]
    fn sublinear_pareto() {
        let d = check(&D::exact_tail_pareto(0.8, 1.0).unwrap(), 10_000, 0.4);
        assert_eq!(d.i1, 0.0);
        assert_eq!(d.regime, RegimeTag::SubLinear);
    }

    #[test]
    fn symmetric_pareto_uses_partial_expectation() {
        let dist = D::symmetric_pareto(2.5).unwrap();
        let d = check(&dist, 10_000, 0.3);
        assert_eq!(d.regime, RegimeTag::Concentrated);
        assert!(d.b1 < dist.prob_at_most(0) + 1e-3);
    }

    #[test]
    fn preconditions() {
        let dist = D::exact_tail_pareto(3.0, 1.0).unwrap().with_certificate_exponent(3.0).unwrap();
        let spec = TailClassSpec::symmetric(3.0, 1.0).unwrap();
        let s = mu_schedule(100, 0.1, 3.0).unwrap();
        assert!(matches!(interval_decomposition(&dist, &s, &spec), Err(Error::InvalidSchedule(_))));
        let s = MuSchedule::with_mu(10_000, 0.3, 3.0, 1.5).unwrap();
        assert!(matches!(interval_decomposition(&dist, &s, &spec), Err(Error::InvalidSchedule(_))));
        let right_only = TailClassSpec::right_only(3.0, 1.0).unwrap();
        let s = mu_schedule(10_000, 0.3, 3.0).unwrap();
        assert!(matches!(interval_decomposition(&dist, &s, &right_only), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn remainders_reject_wrong_regime() {
        assert!(t0_term(1.5, 1.0, 0.01).is_err());
        assert!(tau_term(1.0, 1.0, 1.0, 0.01).is_err());
        assert!(t0_term(1.0, 1.0, 0.01).unwrap() > 0.0);
        assert!(tau_term(2.0, 1.0, 1.0, 0.01).unwrap() > 0.0);
    }
}
