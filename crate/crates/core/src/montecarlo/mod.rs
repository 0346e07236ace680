//! Monte Carlo estimates of tail probabilities of `S_n` with exact binomial
//! confidence intervals.

mod clopper_pearson;
mod experiment;
mod report;

pub use clopper_pearson::clopper_pearson;
pub use experiment::{
    empirical_quantile, run_experiment, run_simulation, simulate_sums, EmpiricalTailEstimate, ExperimentPlan, Side,
    Simulation, CONFIDENCE, MIN_TRIALS,
};
pub use report::{bound_kind_str, compare, verdict, write_report_csv, ComparisonVerdict, ReportRow};
