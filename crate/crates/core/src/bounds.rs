//! Closed-form tail bounds for `S_n` and their finite-n counterparts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact_engine::{t0_term, tau_term, MuSchedule};
use crate::scalar::Scalar;
use crate::tail_model::{aggregate_sequence, RegimeTag, TailClassSpec, TailSide};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Thm1Right,
    Thm2Left,
    Thm3RightCentered,
    Thm4LeftCentered,
    PreAsymptotic,
}

/// A bound value with its additive breakdown.
///
/// `terms` always sums to `raw_value`; auxiliary quantities such as the
/// remainder `T` go to `diagnostics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BoundEvaluation<T> {
    pub kind: BoundKind,
    #[serde(rename = "x")]
    pub threshold_x: T,
    pub value: T,
    #[serde(rename = "raw")]
    pub raw_value: T,
    pub terms: BTreeMap<String, T>,
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, T>,
}

impl<T: Scalar> BoundEvaluation<T> {
    fn from_terms(kind: BoundKind, threshold_x: T, union: T, mgf: T) -> Self {
        let raw_value = union + mgf;
        let terms = BTreeMap::from([("union".to_string(), union), ("mgf".to_string(), mgf)]);
        Self {
            kind,
            threshold_x,
            value: raw_value.max(T::zero()).min(T::one()),
            raw_value,
            terms,
            vacuous: raw_value >= T::one(),
            diagnostics: BTreeMap::new(),
        }
    }

    /// Sum of two one-sided bounds on the same threshold magnitude, used for
    /// `|S_n - E S_n| >= x`.
    pub fn union_with(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (side, eval) in [("right", self), ("left", other)] {
            for (name, v) in &eval.terms {
                terms.insert(format!("{side}_{name}"), *v);
            }
        }
        let raw_value = self.raw_value + other.raw_value;
        Self {
            kind: self.kind,
            threshold_x: self.threshold_x.abs(),
            value: raw_value.max(T::zero()).min(T::one()),
            raw_value,
            terms,
            vacuous: raw_value >= T::one(),
            diagnostics: BTreeMap::new(),
        }
    }
}

fn check_n_eps<T: Scalar>(n: u64, epsilon: T) -> Result<T> {
    if n < 2 {
        return invalid(format!("n must be at least 2, got {n}"));
    }
    if !(epsilon.is_finite() && epsilon > T::zero()) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    Ok(T::lit(n as f64))
}

/// `(V + e^(2V)) n^(-alpha_r eps)` for `P[S_n >= n^(1/alpha_r + eps)]`.
pub fn thm1_bound<T: Scalar>(spec: &TailClassSpec<T>, n: u64, epsilon: T) -> Result<BoundEvaluation<T>> {
    let n_s = check_n_eps(n, epsilon)?;
    let (alpha, v) = (spec.alpha_r(), spec.v());
    if alpha > T::one() {
        return Err(Error::WrongRegime(format!("needs alpha_r <= 1, got {alpha}")));
    }
    let decay = n_s.powf(-alpha * epsilon);
    let x = n_s.powf(alpha.recip() + epsilon);
    Ok(BoundEvaluation::from_terms(BoundKind::Thm1Right, x, v * decay, (T::lit(2.0) * v).exp() * decay))
}

/// `(W + e^(2W)) n^(-alpha_l eps)` for `P[S_n <= -n^(1/alpha_l + eps)]`.
pub fn thm2_bound<T: Scalar>(spec: &TailClassSpec<T>, n: u64, epsilon: T) -> Result<BoundEvaluation<T>> {
    let mut eval = thm1_bound(&spec.mirrored()?, n, epsilon).map_err(|e| match e {
        Error::WrongRegime(_) => Error::WrongRegime(format!("needs alpha_l <= 1, got {:?}", spec.alpha_l())),
        other => other,
    })?;
    eval.kind = BoundKind::Thm2Left;
    eval.threshold_x = -eval.threshold_x;
    Ok(eval)
}

fn centered<T: Scalar>(spec: &TailClassSpec<T>, n: u64, epsilon: T, kind: BoundKind) -> Result<BoundEvaluation<T>> {
    let n_s = check_n_eps(n, epsilon)?;
    let w = spec
        .w()
        .ok_or_else(|| Error::InvalidInput("centered bounds need both tails certified".into()))?;
    let alpha = spec.min_alpha();
    if alpha <= T::one() {
        return Err(Error::WrongRegime(format!("needs min alpha > 1, got {alpha}")));
    }
    let c = if kind == BoundKind::Thm3RightCentered { spec.v() } else { w };
    let one = T::one();
    let decay = n_s.powf(-alpha * epsilon);
    let union = c * n_s.powf(one - one.max(alpha / T::lit(2.0)) - alpha * epsilon);
    let x = n_s.powf(alpha.recip().max(T::lit(0.5)) + epsilon);
    Ok(BoundEvaluation::from_terms(kind, x, union, (T::lit(2.0) * c).exp() * decay))
}

/// `V n^(1 - max(1, alpha/2) - alpha eps) + e^(2V) n^(-alpha eps)` for
/// `P[S_n - E S_n >= n^(max(1/alpha, 1/2) + eps)]`, `alpha = min(alpha_l, alpha_r)`.
pub fn thm3_bound<T: Scalar>(spec: &TailClassSpec<T>, n: u64, epsilon: T) -> Result<BoundEvaluation<T>> {
    centered(spec, n, epsilon, BoundKind::Thm3RightCentered)
}

/// The left counterpart of [`thm3_bound`], with `W` in place of `V`.
pub fn thm4_bound<T: Scalar>(spec: &TailClassSpec<T>, n: u64, epsilon: T) -> Result<BoundEvaluation<T>> {
    centered(spec, n, epsilon, BoundKind::Thm4LeftCentered)
}

/// `V e^(mu x) n x^-alpha - mu x`, the deterministic part of the exponent in
/// the finite-n bound.
pub fn exponent_gap<T: Scalar>(v: T, schedule: &MuSchedule<T>) -> T {
    let (alpha, x) = (schedule.alpha, schedule.x);
    let log_ratio = schedule.mu_x() + schedule.n_scalar().ln() - alpha * x.ln();
    v * log_ratio.exp() - schedule.mu_x()
}

/// `n V x^-alpha + exp(-mu x + n T(alpha, mu) + V e^(mu x) n x^-alpha)`.
///
/// `side` selects the event: `Right` bounds `S_n - E >= x`, `Left` bounds
/// `S_n - E <= -x` by mirroring the certificate, where `E` is `0` for
/// `alpha <= 1` and `E S_n` otherwise. Valid for every `n` with `mu < 1`.
pub fn preasymptotic_bound<T: Scalar>(
    specs: &[TailClassSpec<T>],
    schedule: &MuSchedule<T>,
    side: TailSide,
) -> Result<BoundEvaluation<T>> {
    let agg = aggregate_sequence(specs)?;
    let spec = match side {
        TailSide::Right => agg,
        TailSide::Left => agg.mirrored()?,
    };
    let (alpha, mu, x) = (schedule.alpha, schedule.mu, schedule.x);
    if !(mu < T::one()) {
        return Err(Error::InvalidSchedule(format!("mu = {mu} is not below 1")));
    }
    let v = spec.v();
    let (name, remainder) = match RegimeTag::of_exponent(alpha) {
        RegimeTag::SubLinear => {
            if alpha > spec.alpha_r() {
                return Err(Error::WrongRegime(format!(
                    "schedule alpha {alpha} exceeds certified exponent {}",
                    spec.alpha_r()
                )));
            }
            ("t0", t0_term(alpha, v, mu)?)
        }
        RegimeTag::Concentrated => {
            let w = spec
                .w()
                .ok_or_else(|| Error::WrongRegime("alpha > 1 needs both tails certified".into()))?;
            if alpha > spec.min_alpha() {
                return Err(Error::WrongRegime(format!(
                    "schedule alpha {alpha} exceeds certified exponent {}",
                    spec.min_alpha()
                )));
            }
            ("tau", tau_term(alpha, v, w, mu)?)
        }
    };
    let n_s = schedule.n_scalar();
    let union = n_s * v * x.powf(-alpha);
    let exponent = n_s * remainder + exponent_gap(v, schedule);
    let threshold = match side {
        TailSide::Right => x,
        TailSide::Left => -x,
    };
    let mut eval = BoundEvaluation::from_terms(BoundKind::PreAsymptotic, threshold, union, exponent.exp());
    eval.diagnostics = BTreeMap::from([
        (name.to_string(), remainder),
        ("n_times_remainder".to_string(), n_s * remainder),
        ("exponent".to_string(), exponent),
        ("mu".to_string(), mu),
    ]);
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::mu_schedule;
    use approx::assert_relative_eq;

    fn spec(alpha: f64, v: f64) -> TailClassSpec<f64> {
        TailClassSpec::symmetric(alpha, v).unwrap()
    }

    #[test]
    fn thm1_examples() {
        let e = thm1_bound(&spec(1.0, 1.0), 10_000, 0.5).unwrap();
        let golden = (1.0 + 2f64.exp()) * 1e-2;
        assert_relative_eq!(e.value, golden, max_relative = 1e-12);
        assert_relative_eq!(e.threshold_x, 1e6, max_relative = 1e-12);
        assert!(!e.vacuous);

        let e = thm1_bound(&spec(0.8, 1.0), 100, 0.1).unwrap();
        assert_relative_eq!(e.raw_value, (1.0 + 2f64.exp()) * 10f64.powf(-0.16), max_relative = 1e-12);
        assert!(e.vacuous);
        assert_eq!(e.value, 1.0);

        assert!(matches!(thm1_bound(&spec(1.5, 1.0), 100, 0.1), Err(Error::WrongRegime(_))));
        assert!(thm1_bound(&spec(1.0, 1.0), 1, 0.1).is_err());
        assert!(thm1_bound(&spec(1.0, 1.0), 10, 0.0).is_err());
    }

    #[test]
    fn thm2_mirrors_thm1() {
        let s = TailClassSpec::two_sided(1.0, 0.3, 0.9, 0.5).unwrap();
        let e = thm2_bound(&s, 100_000, 0.2).unwrap();
        let direct = (0.5 + 1f64.exp()) * 1e5f64.powf(-0.9 * 0.2);
        assert_relative_eq!(e.raw_value, direct, max_relative = 1e-12);
        assert!(e.threshold_x < 0.0);
        let swapped = thm1_bound(&TailClassSpec::two_sided(0.9, 0.5, 1.0, 0.3).unwrap(), 100_000, 0.2).unwrap();
        assert_relative_eq!(e.raw_value, swapped.raw_value);
        assert!(thm2_bound(&TailClassSpec::right_only(1.0, 1.0).unwrap(), 100, 0.1).is_err());
    }

    #[test]
    fn thm3_examples() {
        let e = thm3_bound(&spec(2.0, 1.0), 10_000, 0.25).unwrap();
        assert_relative_eq!(e.value, (1.0 + 2f64.exp()) * 1e-2, max_relative = 1e-12);
        assert_relative_eq!(e.threshold_x, 1e3, max_relative = 1e-12);

        let e = thm3_bound(&spec(3.0, 1.0), 1_000_000, 0.1).unwrap();
        let direct = 10f64.powf(-4.8) + 2f64.exp() * 10f64.powf(-1.8);
        assert_relative_eq!(e.raw_value, direct, max_relative = 1e-12);

        let s = TailClassSpec::two_sided(2.5, 1.0, 1.5, 0.2).unwrap();
        let e4 = thm4_bound(&s, 1_000, 0.3).unwrap();
        let direct = 0.2 * 1e3f64.powf(1.0 - 1.0 - 1.5 * 0.3) + 0.4f64.exp() * 1e3f64.powf(-0.45);
        assert_relative_eq!(e4.raw_value, direct, max_relative = 1e-12);
        assert!(matches!(thm3_bound(&spec(1.0, 1.0), 100, 0.1), Err(Error::WrongRegime(_))));
        assert!(matches!(
            thm3_bound(&TailClassSpec::right_only(2.0, 1.0).unwrap(), 100, 0.1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn terms_sum_to_raw() {
        let e = thm3_bound(&spec(2.5, 0.7), 5_000, 0.2).unwrap();
        let sum: f64 = e.terms.values().sum();
        assert!((sum - e.raw_value).abs() <= 1e-12 * e.raw_value);
        let s = mu_schedule(10_000, 0.5, 1.0).unwrap();
        let p = preasymptotic_bound(&[spec(1.0, 1.0)], &s, TailSide::Right).unwrap();
        let sum: f64 = p.terms.values().sum();
        assert!((sum - p.raw_value).abs() <= 1e-12 * p.raw_value);
        assert!(p.raw_value >= p.terms["union"]);
        assert!(p.diagnostics.contains_key("t0"));
    }

    #[test]
    fn exponent_gap_identity() {
        let s = mu_schedule(10_000, 0.5, 1.0).unwrap();
        assert_relative_eq!(exponent_gap(1.0, &s), 1.0 - 0.5 * 1e4f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn preasymptotic_regime_checks() {
        let s = mu_schedule(10_000, 0.3, 2.5).unwrap();
        assert!(preasymptotic_bound(&[TailClassSpec::right_only(2.5, 1.0).unwrap()], &s, TailSide::Right).is_err());
        assert!(preasymptotic_bound(&[spec(2.0, 1.0)], &s, TailSide::Right).is_err());
        let p = preasymptotic_bound(&[spec(2.5, 0.5)], &s, TailSide::Left).unwrap();
        assert!(p.threshold_x < 0.0 && p.diagnostics.contains_key("tau"));
        let fast = MuSchedule::with_mu(10_000, 0.3, 2.5, 1.2).unwrap();
        assert!(matches!(
            preasymptotic_bound(&[spec(2.5, 0.5)], &fast, TailSide::Right),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn json_shape() {
        let e = thm1_bound(&spec(1.0, 1.0), 10_000, 0.5).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.starts_with(r#"{"kind":"thm1_right","x":"#));
        assert!(!text.contains("diagnostics"));
        let back: BoundEvaluation<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
    }
}
