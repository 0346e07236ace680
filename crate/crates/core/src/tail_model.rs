//! Power-law majorization certificates for integer-valued laws.
//!
//! A [`TailClassSpec`] records constants `V, W > 0` and exponents
//! `alpha_r, alpha_l > 0` such that `P[X >= k] <= V k^-alpha_r` and
//! `P[X <= -k] <= W k^-alpha_l` for every integer `k >= 1`. Leaving the left
//! fields out means the left tail is unconstrained.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Right and left tail functions of an integer law, evaluated at `k >= 1`.
pub trait TailFunctions<T: Scalar> {
    /// `P[X >= k]`.
    fn tail_plus(&self, k: i64) -> T;
    /// `P[X <= -k]`.
    fn tail_minus(&self, k: i64) -> T;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec<T>", into = "RawSpec<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TailClassSpec<T> {
    alpha_r: T,
    v: T,
    left: Option<LeftTail<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LeftTail<T> {
    alpha_l: T,
    w: T,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawSpec<T> {
    alpha_r: T,
    v: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_l: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<T>,
}

impl<T: Scalar> TryFrom<RawSpec<T>> for TailClassSpec<T> {
    type Error = Error;

    fn try_from(raw: RawSpec<T>) -> Result<Self> {
        match (raw.alpha_l, raw.w) {
            (None, None) => Self::right_only(raw.alpha_r, raw.v),
            (Some(alpha_l), Some(w)) => Self::two_sided(raw.alpha_r, raw.v, alpha_l, w),
            _ => invalid("alpha_l and w must be given together"),
        }
    }
}

impl<T: Scalar> From<TailClassSpec<T>> for RawSpec<T> {
    fn from(spec: TailClassSpec<T>) -> Self {
        RawSpec {
            alpha_r: spec.alpha_r,
            v: spec.v,
            alpha_l: spec.left.map(|l| l.alpha_l),
            w: spec.left.map(|l| l.w),
        }
    }
}

fn check_positive<T: Scalar>(name: &str, value: T) -> Result<()> {
    if value.is_finite() && value > T::zero() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {value}"))
    }
}

/// Which half of the theory applies to a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    /// `0 < alpha <= 1`: the mean may not exist.
    SubLinear,
    /// `alpha > 1`: finite mean, deviations are measured around it.
    Concentrated,
}

impl RegimeTag {
    pub fn of_exponent<T: Scalar>(alpha: T) -> Self {
        if alpha <= T::one() {
            RegimeTag::SubLinear
        } else {
            RegimeTag::Concentrated
        }
    }
}

impl<T: Scalar> TailClassSpec<T> {
    /// Certificate for `D(., alpha_r)`: right tail only.
    pub fn right_only(alpha_r: T, v: T) -> Result<Self> {
        check_positive("alpha_r", alpha_r)?;
        check_positive("v", v)?;
        Ok(Self { alpha_r, v, left: None })
    }

    /// Certificate for `D(alpha_l, alpha_r)`.
    pub fn two_sided(alpha_r: T, v: T, alpha_l: T, w: T) -> Result<Self> {
        check_positive("alpha_l", alpha_l)?;
        check_positive("w", w)?;
        let mut spec = Self::right_only(alpha_r, v)?;
        spec.left = Some(LeftTail { alpha_l, w });
        Ok(spec)
    }

    /// Same exponent and constant on both sides, the `D(alpha, alpha)` shape.
    pub fn symmetric(alpha: T, c: T) -> Result<Self> {
        Self::two_sided(alpha, c, alpha, c)
    }

    pub fn alpha_r(&self) -> T {
        self.alpha_r
    }

    pub fn v(&self) -> T {
        self.v
    }

    pub fn alpha_l(&self) -> Option<T> {
        self.left.map(|l| l.alpha_l)
    }

    pub fn w(&self) -> Option<T> {
        self.left.map(|l| l.w)
    }

    pub fn has_left(&self) -> bool {
        self.left.is_some()
    }

    /// `min(alpha_l, alpha_r)`, or `alpha_r` when the left tail is unconstrained.
    pub fn min_alpha(&self) -> T {
        match self.left {
            Some(l) => l.alpha_l.min(self.alpha_r),
            None => self.alpha_r,
        }
    }

    pub fn regime(&self) -> RegimeTag {
        RegimeTag::of_exponent(self.min_alpha())
    }

    /// Certificate of `-X`: left and right swapped. Requires both sides.
    pub fn mirrored(&self) -> Result<Self> {
        let l = self
            .left
            .ok_or_else(|| Error::InvalidInput("mirroring needs the left tail fields".into()))?;
        Self::two_sided(l.alpha_l, l.w, self.alpha_r, self.v)
    }

    /// `V k^-alpha_r`.
    pub fn right_majorant(&self, k: i64) -> T {
        self.v * T::from_int(k).powf(-self.alpha_r)
    }

    /// `W k^-alpha_l`, if the left tail is constrained.
    pub fn left_majorant(&self, k: i64) -> Option<T> {
        self.left.map(|l| l.w * T::from_int(k).powf(-l.alpha_l))
    }
}

/// Sequence-level certificate: minimum exponents and maximum constants.
///
/// The result majorizes every member's tails at every `k >= 1`.
pub fn aggregate_sequence<T: Scalar>(specs: &[TailClassSpec<T>]) -> Result<TailClassSpec<T>> {
    let (first, rest) = specs
        .split_first()
        .ok_or_else(|| Error::InvalidInput("cannot aggregate an empty sequence".into()))?;
    let mut agg = *first;
    for spec in rest {
        agg.alpha_r = agg.alpha_r.min(spec.alpha_r);
        agg.v = agg.v.max(spec.v);
        agg.left = match (agg.left, spec.left) {
            (None, None) => None,
            (Some(a), Some(b)) => Some(LeftTail { alpha_l: a.alpha_l.min(b.alpha_l), w: a.w.max(b.w) }),
            _ => return invalid("mixed presence of left-tail fields in sequence"),
        };
    }
    Ok(agg)
}

/// Result of scanning `k = 1..=k_max` against a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport<T> {
    pub k_max: i64,
    pub passed: bool,
    /// Smallest `majorant - tail` seen over both sides.
    pub worst_margin: T,
    pub worst_k: i64,
    pub first_violation: Option<Violation<T>>,
    pub violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation<T> {
    pub k: i64,
    pub side: TailSide,
    pub tail: T,
    pub majorant: T,
}

/// Checks `F+(k) <= V k^-alpha_r` (and the left analogue when constrained)
/// for every `k` in `1..=k_max`.
///
/// Comparisons allow a relative slack of a few ulps of the majorant so that a
/// tail which equals its majorant analytically is not flagged because the two
/// sides were rounded differently. Margins are reported unscaled.
pub fn verify_membership<T, D>(dist: &D, spec: &TailClassSpec<T>, k_max: i64) -> Result<MembershipReport<T>>
where
    T: Scalar,
    D: TailFunctions<T> + ?Sized,
{
    if k_max < 1 {
        return invalid("k_max must be at least 1");
    }
    let slack = T::epsilon() * T::lit(16.0);
    let mut report = MembershipReport {
        k_max,
        passed: true,
        worst_margin: T::infinity(),
        worst_k: 1,
        first_violation: None,
        violations: 0,
    };
    let mut check = |k: i64, side: TailSide, tail: T, majorant: T| {
        let margin = majorant - tail;
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_k = k;
        }
        if tail > majorant * (T::one() + slack) {
            report.passed = false;
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(Violation { k, side, tail, majorant });
            }
        }
    };
    for k in 1..=k_max {
        check(k, TailSide::Right, dist.tail_plus(k), spec.right_majorant(k));
        if let Some(maj) = spec.left_majorant(k) {
            check(k, TailSide::Left, dist.tail_minus(k), maj);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(alpha: f64, v: f64) -> TailClassSpec<f64> {
        TailClassSpec::right_only(alpha, v).unwrap()
    }

    #[test]
    fn aggregate_takes_min_exponent_max_constant() {
        let agg = aggregate_sequence(&[r(2.0, 1.0), r(3.0, 5.0)]).unwrap();
        assert_eq!(agg, r(2.0, 5.0));
        assert_eq!(aggregate_sequence(&[r(1.5, 2.0)]).unwrap(), r(1.5, 2.0));
    }

    #[test]
    fn aggregate_two_sided_componentwise() {
        let a = TailClassSpec::two_sided(0.8, 1.0, 1.2, 3.0).unwrap();
        let b = TailClassSpec::two_sided(2.0, 4.0, 0.9, 1.0).unwrap();
        let agg = aggregate_sequence(&[a, b]).unwrap();
        assert_eq!(agg, TailClassSpec::two_sided(0.8, 4.0, 0.9, 3.0).unwrap());
        assert_eq!(agg.min_alpha(), 0.8);
        assert_eq!(agg.regime(), RegimeTag::SubLinear);
    }

    #[test]
    fn aggregate_rejects_empty_and_mixed() {
        assert!(matches!(aggregate_sequence::<f64>(&[]), Err(Error::InvalidInput(_))));
        let mixed = [r(1.0, 1.0), TailClassSpec::symmetric(1.0, 1.0).unwrap()];
        assert!(matches!(aggregate_sequence(&mixed), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn constructors_validate() {
        assert!(TailClassSpec::right_only(0.0, 1.0).is_err());
        assert!(TailClassSpec::right_only(1.0, -1.0).is_err());
        assert!(TailClassSpec::right_only(f64::NAN, 1.0).is_err());
        assert!(TailClassSpec::two_sided(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn regime_boundary_is_sublinear_at_one() {
        assert_eq!(r(1.0, 1.0).regime(), RegimeTag::SubLinear);
        assert_eq!(r(1.0 + 1e-12, 1.0).regime(), RegimeTag::Concentrated);
    }

    #[test]
    fn json_omits_absent_left_fields() {
        let text = serde_json::to_string(&r(2.0, 1.0)).unwrap();
        assert_eq!(text, r#"{"alpha_r":2.0,"v":1.0}"#);
        let two: TailClassSpec<f64> =
            serde_json::from_str(r#"{"alpha_r":2.5,"v":0.5,"alpha_l":3.0,"w":0.25}"#).unwrap();
        assert_eq!(two.w(), Some(0.25));
        assert!(serde_json::from_str::<TailClassSpec<f64>>(r#"{"alpha_r":2.5,"v":0.5,"w":0.25}"#).is_err());
        assert!(serde_json::from_str::<TailClassSpec<f64>>(r#"{"alpha_r":-1,"v":0.5}"#).is_err());
    }

    struct PowerTail(f64, f64);

    impl TailFunctions<f64> for PowerTail {
        fn tail_plus(&self, k: i64) -> f64 {
            (self.0 * (k as f64).powf(-self.1)).min(1.0)
        }
        fn tail_minus(&self, _k: i64) -> f64 {
            0.0
        }
    }

    #[test]
    fn membership_reports_first_violation() {
        let report = verify_membership(&PowerTail(1.0, 1.0), &r(2.0, 1.0), 20).unwrap();
        assert!(!report.passed);
        assert_eq!(report.first_violation.unwrap().k, 2);
        assert_eq!(report.violations, 19);
        assert!(verify_membership(&PowerTail(1.0, 1.0), &r(1.0, 1.0), 0).is_err());
    }
}
