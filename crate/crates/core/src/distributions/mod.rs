//! Integer-valued laws with closed-form tails and certified power majorants.

mod sampling;
pub mod series;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{CompensatedSum, Scalar};
use crate::tail_model::{TailClassSpec, TailFunctions};

/// Default exponent certified for laws whose tails decay faster than any power.
pub const DEFAULT_LIGHT_TAIL_EXPONENT: f64 = 2.0;

/// The law itself, without its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum DistKind<T> {
    /// `P[X >= k] = v k^-alpha` for `k >= 1`, `P[X = 0] = 1 - v`.
    ExactTailPareto {
        alpha: T,
        #[serde(default = "T::one")]
        v: T,
    },
    /// `P[X = k] = (1-p)^(k-1) p` on `k >= 1`.
    Geometric { p: T },
    PointMass { c: i64 },
    /// Draws from `right` with probability `p_right`, otherwise from `-left`.
    #[serde(rename = "two_sided")]
    TwoSidedMixture {
        right: Box<IntegerDistribution<T>>,
        left: Box<IntegerDistribution<T>>,
        p_right: T,
    },
}

/// An exactly computable integer law together with a certificate
/// [`TailClassSpec`] that its tails satisfy at every `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution<T>", into = "RawDistribution<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct IntegerDistribution<T> {
    kind: DistKind<T>,
    certified: TailClassSpec<T>,
    cert_alpha: Option<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct RawDistribution<T> {
    #[serde(flatten)]
    kind: DistKind<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cert_alpha: Option<T>,
}

impl<T: Scalar> TryFrom<RawDistribution<T>> for IntegerDistribution<T> {
    type Error = Error;

    fn try_from(raw: RawDistribution<T>) -> Result<Self> {
        let dist = Self::from_kind(raw.kind)?;
        match raw.cert_alpha {
            Some(alpha) => dist.with_certificate_exponent(alpha),
            None => Ok(dist),
        }
    }
}

impl<T: Scalar> From<IntegerDistribution<T>> for RawDistribution<T> {
    fn from(dist: IntegerDistribution<T>) -> Self {
        RawDistribution { kind: dist.kind, cert_alpha: dist.cert_alpha }
    }
}

/// Value of the tail-sum expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation<T> {
    Finite(T),
    Divergent,
}

impl<T: Scalar> Expectation<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Expectation::Finite(x) => Some(x),
            Expectation::Divergent => None,
        }
    }
}

fn in_unit_open<T: Scalar>(x: T) -> bool {
    x > T::zero() && x < T::one()
}

impl<T: Scalar> IntegerDistribution<T> {
    pub fn exact_tail_pareto(alpha: T, v: T) -> Result<Self> {
        Self::from_kind(DistKind::ExactTailPareto { alpha, v })
    }

    pub fn geometric(p: T) -> Result<Self> {
        Self::from_kind(DistKind::Geometric { p })
    }

    pub fn point_mass(c: i64) -> Self {
        Self::from_kind(DistKind::PointMass { c }).expect("point mass is always valid")
    }

    pub fn two_sided(right: Self, left: Self, p_right: T) -> Result<Self> {
        Self::from_kind(DistKind::TwoSidedMixture {
            right: Box::new(right),
            left: Box::new(left),
            p_right,
        })
    }

    /// Exact-tail Pareto on both sides with equal weight.
    pub fn symmetric_pareto(alpha: T) -> Result<Self> {
        let side = Self::exact_tail_pareto(alpha, T::one())?;
        Self::two_sided(side.clone(), side, T::lit(0.5))
    }

    pub fn from_kind(kind: DistKind<T>) -> Result<Self> {
        match &kind {
            DistKind::ExactTailPareto { alpha, v } => {
                if !(alpha.is_finite() && *alpha > T::zero()) {
                    return invalid(format!("pareto alpha must be positive, got {alpha}"));
                }
                if !(*v > T::zero() && *v <= T::one()) {
                    return invalid(format!("pareto v must lie in (0, 1], got {v}"));
                }
            }
            DistKind::Geometric { p } => {
                if !in_unit_open(*p) {
                    return invalid(format!("geometric p must lie in (0, 1), got {p}"));
                }
            }
            DistKind::PointMass { .. } => {}
            DistKind::TwoSidedMixture { p_right, .. } => {
                if !(*p_right >= T::zero() && *p_right <= T::one()) {
                    return invalid(format!("p_right must lie in [0, 1], got {p_right}"));
                }
            }
        }
        let (alpha_r, alpha_l) = natural_exponents(&kind);
        let certified = certificate(&kind, alpha_r, alpha_l)?;
        Ok(Self { kind, certified, cert_alpha: None })
    }

    /// Re-certifies with exponent `alpha` on both tails, using the smallest
    /// constants this crate can prove for that exponent.
    pub fn with_certificate_exponent(mut self, alpha: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha > T::zero()) {
            return invalid(format!("certificate exponent must be positive, got {alpha}"));
        }
        self.certified = certificate(&self.kind, Some(alpha), Some(alpha))?;
        self.cert_alpha = Some(alpha);
        Ok(self)
    }

    pub fn kind(&self) -> &DistKind<T> {
        &self.kind
    }

    pub fn certified(&self) -> &TailClassSpec<T> {
        &self.certified
    }

    /// Short identifier used in report rows.
    pub fn label(&self) -> String {
        match &self.kind {
            DistKind::ExactTailPareto { alpha, v } => format!("pareto({alpha},{v})"),
            DistKind::Geometric { p } => format!("geometric({p})"),
            DistKind::PointMass { c } => format!("point({c})"),
            DistKind::TwoSidedMixture { right, left, p_right } => {
                format!("two_sided({},{},{p_right})", right.label(), left.label())
            }
        }
    }

    /// `P[X = k]`.
    pub fn pmf(&self, k: i64) -> T {
        match &self.kind {
            DistKind::ExactTailPareto { alpha, v } => match k {
                k if k < 0 => T::zero(),
                0 => T::one() - *v,
                k => pareto_pmf(*alpha, *v, T::from_int(k)),
            },
            DistKind::Geometric { p } => {
                if k < 1 {
                    T::zero()
                } else {
                    *p * (T::from_int(k - 1) * (T::one() - *p).ln()).exp()
                }
            }
            DistKind::PointMass { c } => {
                if k == *c {
                    T::one()
                } else {
                    T::zero()
                }
            }
            DistKind::TwoSidedMixture { right, left, p_right } => {
                *p_right * right.pmf(k) + (T::one() - *p_right) * left.pmf(-k)
            }
        }
    }

    /// `P[X >= k]` for any integer `k`.
    pub fn prob_at_least(&self, k: i64) -> T {
        match &self.kind {
            DistKind::ExactTailPareto { alpha, v } => {
                if k <= 0 {
                    T::one()
                } else {
                    *v * T::from_int(k).powf(-*alpha)
                }
            }
            DistKind::Geometric { p } => {
                if k <= 1 {
                    T::one()
                } else {
                    (T::from_int(k - 1) * (T::one() - *p).ln()).exp()
                }
            }
            DistKind::PointMass { c } => {
                if *c >= k {
                    T::one()
                } else {
                    T::zero()
                }
            }
            DistKind::TwoSidedMixture { right, left, p_right } => {
                *p_right * right.prob_at_least(k) + (T::one() - *p_right) * left.prob_at_most(-k)
            }
        }
    }

    /// `P[X <= k]` for any integer `k`.
    pub fn prob_at_most(&self, k: i64) -> T {
        match &self.kind {
            DistKind::ExactTailPareto { alpha, v } => {
                if k < 0 {
                    T::zero()
                } else {
                    T::one() - *v * T::from_int(k + 1).powf(-*alpha)
                }
            }
            DistKind::Geometric { p } => {
                if k < 1 {
                    T::zero()
                } else {
                    -(T::from_int(k) * (T::one() - *p).ln()).exp_m1()
                }
            }
            DistKind::PointMass { c } => {
                if *c <= k {
                    T::one()
                } else {
                    T::zero()
                }
            }
            DistKind::TwoSidedMixture { right, left, p_right } => {
                *p_right * right.prob_at_most(k) + (T::one() - *p_right) * left.prob_at_least(-k)
            }
        }
    }

    /// `sum_{j >= 1} P[X >= j]`, or `None` when the series diverges.
    pub fn right_tail_sum(&self) -> Option<T> {
        match &self.kind {
            DistKind::ExactTailPareto { alpha, v } => {
                (*alpha > T::one()).then(|| *v * series::zeta(*alpha))
            }
            DistKind::Geometric { p } => Some(geometric_tail_sum(*p)),
            DistKind::PointMass { c } => Some(T::from_int((*c).max(0))),
            DistKind::TwoSidedMixture { right, left, p_right } => {
                mix_sums(*p_right, || right.right_tail_sum(), || left.left_tail_sum())
            }
        }
    }

    /// `sum_{j >= 1} P[X <= -j]`, or `None` when the series diverges.
    pub fn left_tail_sum(&self) -> Option<T> {
        match &self.kind {
            DistKind::ExactTailPareto { .. } | DistKind::Geometric { .. } => Some(T::zero()),
            DistKind::PointMass { c } => Some(T::from_int((-*c).max(0))),
            DistKind::TwoSidedMixture { right, left, p_right } => {
                mix_sums(*p_right, || right.left_tail_sum(), || left.right_tail_sum())
            }
        }
    }

    /// `E X` through the tail-sum formula `sum F+(j) - sum F-(j)`.
    ///
    /// A divergent side makes the whole value [`Expectation::Divergent`].
    pub fn expectation_tail_sum(&self) -> Expectation<T> {
        match (self.right_tail_sum(), self.left_tail_sum()) {
            (Some(r), Some(l)) => Expectation::Finite(r - l),
            _ => Expectation::Divergent,
        }
    }

    /// `sum_{lo <= k <= hi} e^{mu k} P[X = k]`; `None` bounds are infinite.
    ///
    /// An infinite upper bound requires the weighted series to converge.
    pub fn exp_weighted_sum(&self, mu: T, lo: Option<i64>, hi: Option<i64>) -> Result<T> {
        if let (Some(a), Some(b)) = (lo, hi) {
            if b < a {
                return Ok(T::zero());
            }
        }
        let contains = |k: i64| lo.map_or(true, |a| k >= a) && hi.map_or(true, |b| k <= b);
        match &self.kind {
            DistKind::PointMass { c } => Ok(if contains(*c) { (mu * T::from_int(*c)).exp() } else { T::zero() }),
            DistKind::Geometric { p } => geometric_weighted_sum(*p, mu, lo.unwrap_or(1).max(1), hi),
            DistKind::ExactTailPareto { alpha, v } => {
                let mut total = if contains(0) { T::one() - *v } else { T::zero() };
                let first = lo.unwrap_or(1).max(1);
                total = total + pareto_weighted_sum(*alpha, *v, mu, first, hi)?;
                Ok(total)
            }
            DistKind::TwoSidedMixture { right, left, p_right } => {
                let q = T::one() - *p_right;
                let mut total = T::zero();
                if *p_right > T::zero() {
                    total = total + *p_right * right.exp_weighted_sum(mu, lo, hi)?;
                }
                if q > T::zero() {
                    total = total + q * left.exp_weighted_sum(-mu, hi.map(|b| -b), lo.map(|a| -a))?;
                }
                Ok(total)
            }
        }
    }

    /// Whether the right tail is identically zero.
    fn right_is_zero(&self) -> bool {
        natural_exponents(&self.kind).0.is_none()
    }
}

impl<T: Scalar> TailFunctions<T> for IntegerDistribution<T> {
    fn tail_plus(&self, k: i64) -> T {
        self.prob_at_least(k)
    }

    fn tail_minus(&self, k: i64) -> T {
        self.prob_at_most(-k)
    }
}

fn mix_sums<T: Scalar>(
    p: T,
    first: impl FnOnce() -> Option<T>,
    second: impl FnOnce() -> Option<T>,
) -> Option<T> {
    let q = T::one() - p;
    let a = if p > T::zero() { p * first()? } else { T::zero() };
    let b = if q > T::zero() { q * second()? } else { T::zero() };
    Some(a + b)
}

/// `v (k^-alpha - (k+1)^-alpha)` without cancellation at large `k`.
pub(crate) fn pareto_pmf<T: Scalar>(alpha: T, v: T, k: T) -> T {
    v * k.powf(-alpha) * -(-alpha * k.recip().ln_1p()).exp_m1()
}

fn ln_pareto_pmf<T: Scalar>(alpha: T, v: T, t: T) -> T {
    v.ln() - alpha * t.ln() + (-(-alpha * t.recip().ln_1p()).exp_m1()).ln()
}

/// `sum_{j>=1} q^(j-1)`, accumulated until the geometric remainder
/// `q^K / p` is below `1e-10`.
fn geometric_tail_sum<T: Scalar>(p: T) -> T {
    let q = T::one() - p;
    if p < T::lit(1e-5) {
        return p.recip();
    }
    let tol = T::lit(1e-10);
    let mut acc = CompensatedSum::new();
    let mut term = T::one();
    loop {
        acc.add(term);
        term = term * q;
        if term / p < tol {
            break;
        }
    }
    // remainder sum_{j>K} q^(j-1) = term / p, added so the result is exact to rounding
    acc.add(term / p);
    acc.value()
}

fn geometric_weighted_sum<T: Scalar>(p: T, mu: T, first: i64, last: Option<i64>) -> Result<T> {
    let ln_q = (T::one() - p).ln();
    let ln_r = ln_q + mu;
    let lead = (mu * T::from_int(first) + ln_q * T::from_int(first - 1)).exp() * p;
    let ratio_sum = match last {
        Some(last) if last < first => return Ok(T::zero()),
        Some(last) => {
            let m = T::from_int(last - first + 1);
            if ln_r == T::zero() {
                m
            } else {
                (m * ln_r).exp_m1() / ln_r.exp_m1()
            }
        }
        None => {
            if ln_r >= T::zero() {
                return Err(Error::UnsupportedScale(format!(
                    "e^(mu k) P[X=k] is not summable for geometric p={p}, mu={mu}"
                )));
            }
            -ln_r.exp_m1().recip()
        }
    };
    Ok(lead * ratio_sum)
}

fn pareto_weighted_sum<T: Scalar>(alpha: T, v: T, mu: T, first: i64, last: Option<i64>) -> Result<T> {
    if last.is_none() {
        if mu > T::zero() {
            return Err(Error::UnsupportedScale(format!(
                "e^(mu k) P[X=k] is not summable for pareto alpha={alpha} with mu={mu} > 0"
            )));
        }
        if mu == T::zero() {
            return Ok(v * T::from_int(first).powf(-alpha));
        }
    }
    let h = move |t: T| (mu * t + ln_pareto_pmf(alpha, v, t)).exp();
    let tail_bound = move |t: T| (mu * t).exp() * v * t.powf(-alpha);
    Ok(series::smooth_sum(&h, first, last, &tail_bound, mu.abs()))
}

/// Exponents used by the default certificate: `None` marks a tail that is
/// identically zero.
fn natural_exponents<T: Scalar>(kind: &DistKind<T>) -> (Option<T>, Option<T>) {
    match kind {
        DistKind::ExactTailPareto { alpha, .. } => (Some(*alpha), None),
        DistKind::Geometric { .. } => (Some(T::lit(DEFAULT_LIGHT_TAIL_EXPONENT)), None),
        DistKind::PointMass { c } => {
            let a = Some(T::lit(DEFAULT_LIGHT_TAIL_EXPONENT));
            match c.signum() {
                1 => (a, None),
                -1 => (None, a),
                _ => (None, None),
            }
        }
        DistKind::TwoSidedMixture { right, left, p_right } => {
            let q = T::one() - *p_right;
            let side = |from_right: Option<T>, from_left: Option<T>| {
                let a = from_right.filter(|_| *p_right > T::zero());
                let b = from_left.filter(|_| q > T::zero());
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            };
            let r_exp = |d: &IntegerDistribution<T>| (!d.right_is_zero()).then(|| d.certified.alpha_r());
            let l_exp = |d: &IntegerDistribution<T>| {
                let zero_left = natural_exponents(&d.kind).1.is_none();
                (!zero_left).then(|| d.certified.alpha_l().unwrap_or(d.certified.alpha_r()))
            };
            (side(r_exp(right), l_exp(left)), side(l_exp(right), r_exp(left)))
        }
    }
}

/// Smallest provable `V` with `P[X >= k] <= V k^-alpha`; `Ok(None)` for a
/// zero tail.
fn right_constant<T: Scalar>(kind: &DistKind<T>, alpha: T) -> Result<Option<T>> {
    match kind {
        DistKind::ExactTailPareto { alpha: a, v } => {
            if alpha > *a {
                invalid(format!("pareto tail k^-{a} is not majorized by any V k^-{alpha}"))
            } else {
                Ok(Some(*v))
            }
        }
        DistKind::Geometric { p } => Ok(Some(geometric_constant(*p, alpha))),
        DistKind::PointMass { c } => Ok((*c >= 1).then(|| T::from_int(*c).powf(alpha))),
        DistKind::TwoSidedMixture { right, left, p_right } => {
            let q = T::one() - *p_right;
            let a = if *p_right > T::zero() { right_constant(&right.kind, alpha)? } else { None };
            let b = if q > T::zero() { left_constant(&left.kind, alpha)? } else { None };
            Ok(weighted(*p_right, a, q, b))
        }
    }
}

fn left_constant<T: Scalar>(kind: &DistKind<T>, alpha: T) -> Result<Option<T>> {
    match kind {
        DistKind::ExactTailPareto { .. } | DistKind::Geometric { .. } => Ok(None),
        DistKind::PointMass { c } => Ok((*c <= -1).then(|| T::from_int(-*c).powf(alpha))),
        DistKind::TwoSidedMixture { right, left, p_right } => {
            let q = T::one() - *p_right;
            let a = if *p_right > T::zero() { left_constant(&right.kind, alpha)? } else { None };
            let b = if q > T::zero() { right_constant(&left.kind, alpha)? } else { None };
            Ok(weighted(*p_right, a, q, b))
        }
    }
}

fn weighted<T: Scalar>(p: T, a: Option<T>, q: T, b: Option<T>) -> Option<T> {
    match (a, b) {
        (None, None) => None,
        (a, b) => Some(p * a.unwrap_or_else(T::zero) + q * b.unwrap_or_else(T::zero)),
    }
}

/// `max_{k >= 1} (1-p)^(k-1) k^alpha`, inflated by `1e-12` relative so that
/// the argmax survives rounding in membership scans.
fn geometric_constant<T: Scalar>(p: T, alpha: T) -> T {
    let ln_q = (T::one() - p).ln();
    let g = |k: T| ((k - T::one()) * ln_q + alpha * k.ln()).exp();
    let peak = (alpha / -ln_q).max(T::one());
    let lo = peak.floor().max(T::one());
    g(lo).max(g(lo + T::one())) * (T::one() + T::lit(1e-12))
}

/// Builds the certificate for exponents `(alpha_r, alpha_l)`. A zero tail is
/// certified with the opposite side's exponent and constant.
fn certificate<T: Scalar>(kind: &DistKind<T>, alpha_r: Option<T>, alpha_l: Option<T>) -> Result<TailClassSpec<T>> {
    let fallback = T::lit(DEFAULT_LIGHT_TAIL_EXPONENT);
    let a_r = alpha_r.or(alpha_l).unwrap_or(fallback);
    let a_l = alpha_l.or(alpha_r).unwrap_or(fallback);
    let v = right_constant(kind, a_r)?;
    let w = left_constant(kind, a_l)?;
    let (v, w) = match (v, w) {
        (Some(v), Some(w)) => (v, w),
        (Some(v), None) => (v, v),
        (None, Some(w)) => (w, w),
        (None, None) => (T::one(), T::one()),
    };
    TailClassSpec::two_sided(a_r, v, a_l, w)
}
