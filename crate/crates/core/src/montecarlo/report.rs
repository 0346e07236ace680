use std::io::Write;

use serde::{Deserialize, Serialize};

use super::experiment::{EmpiricalTailEstimate, ExperimentPlan, Side};
use crate::bounds::{BoundEvaluation, BoundKind};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonVerdict {
    /// `ci_high <= value`
    BoundHolds,
    /// The interval straddles the bound.
    Inconclusive,
    /// `ci_low > value`
    BoundViolated,
}

impl ComparisonVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ComparisonVerdict::BoundHolds => "bound_holds",
            ComparisonVerdict::Inconclusive => "inconclusive",
            ComparisonVerdict::BoundViolated => "bound_violated",
        }
    }
}

/// Places the confidence interval relative to the clamped bound value.
///
/// The bound must refer to the same threshold magnitude as the estimate.
pub fn compare(estimate: &EmpiricalTailEstimate, bound: &BoundEvaluation<f64>) -> Result<ComparisonVerdict> {
    let (a, b) = (estimate.threshold_x, bound.threshold_x.abs());
    if (a - b).abs() > 1e-9 * a.abs().max(b) {
        return invalid(format!("estimate threshold {a} does not match bound threshold {b}"));
    }
    Ok(verdict(estimate.ci_low, estimate.ci_high, bound.value))
}

pub fn verdict(ci_low: f64, ci_high: f64, value: f64) -> ComparisonVerdict {
    if ci_high <= value {
        ComparisonVerdict::BoundHolds
    } else if ci_low > value {
        ComparisonVerdict::BoundViolated
    } else {
        ComparisonVerdict::Inconclusive
    }
}

pub fn bound_kind_str(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Thm1Right => "thm1_right",
        BoundKind::Thm2Left => "thm2_left",
        BoundKind::Thm3RightCentered => "thm3_right_centered",
        BoundKind::Thm4LeftCentered => "thm4_left_centered",
        BoundKind::PreAsymptotic => "pre_asymptotic",
    }
}

fn row_bound_kind(plan: &ExperimentPlan, bound: &BoundEvaluation<f64>) -> String {
    match (plan.side, bound.kind) {
        (Side::CenteredAbs, BoundKind::Thm3RightCentered | BoundKind::Thm4LeftCentered) => "thm3+thm4".to_string(),
        (_, kind) => bound_kind_str(kind).to_string(),
    }
}

/// One estimate against one bound; column order is the CSV order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dist_id: String,
    pub n: u64,
    pub epsilon: f64,
    pub side: String,
    pub trials: u64,
    pub seed: u64,
    pub x: f64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound_kind: String,
    pub bound_value: f64,
    pub verdict: ComparisonVerdict,
}

impl ReportRow {
    pub fn new(plan: &ExperimentPlan, est: &EmpiricalTailEstimate, bound: &BoundEvaluation<f64>) -> Result<Self> {
        let verdict = compare(est, bound)?;
        let dist_id = plan.dists.iter().map(|d| d.label()).collect::<Vec<_>>().join("+");
        Ok(Self {
            dist_id,
            n: plan.n,
            epsilon: plan.epsilon,
            side: plan.side.as_str().to_string(),
            trials: plan.trials,
            seed: plan.seed,
            x: est.threshold_x,
            hits: est.hits,
            p_hat: est.p_hat,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            bound_kind: row_bound_kind(plan, bound),
            bound_value: bound.value,
            verdict,
        })
    }

    /// A violated non-vacuous finite-n bound cannot be explained by asymptotics.
    pub fn is_red_flag(&self) -> bool {
        self.verdict == ComparisonVerdict::BoundViolated && self.bound_kind == "pre_asymptotic" && self.bound_value < 1.0
    }
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_examples() {
        assert_eq!(verdict(0.0, 0.0, 0.5), ComparisonVerdict::BoundHolds);
        assert_eq!(verdict(0.02, 0.04, 0.03), ComparisonVerdict::Inconclusive);
        assert_eq!(verdict(0.2, 0.3, 0.08), ComparisonVerdict::BoundViolated);
    }

    #[test]
    fn mismatched_threshold_is_rejected() {
        let est = EmpiricalTailEstimate {
            hits: 0,
            trials: 100,
            p_hat: 0.0,
            ci_low: 0.0,
            ci_high: 0.05,
            threshold_x: 10.0,
            mean_used: None,
        };
        let spec = crate::tail_model::TailClassSpec::symmetric(1.0, 1.0).unwrap();
        let bound = crate::bounds::thm1_bound(&spec, 10_000, 0.5).unwrap();
        assert!(compare(&est, &bound).is_err());
        let est = EmpiricalTailEstimate { threshold_x: bound.threshold_x, ..est };
        assert_eq!(compare(&est, &bound).unwrap(), ComparisonVerdict::BoundHolds);
    }
}
