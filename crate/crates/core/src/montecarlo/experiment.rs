use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clopper_pearson::clopper_pearson;
use crate::bounds::{preasymptotic_bound, thm1_bound, thm2_bound, thm3_bound, thm4_bound, BoundEvaluation};
use crate::distributions::IntegerDistribution;
use crate::error::{invalid, Error, Result};
use crate::exact_engine::{threshold_exponent, MuSchedule};
use crate::tail_model::{aggregate_sequence, RegimeTag, TailClassSpec, TailSide};

/// Coverage of the reported binomial intervals.
pub const CONFIDENCE: f64 = 0.99;
pub const MIN_TRIALS: u64 = 100;

/// Which deviation of `S_n` is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `S_n >= x`
    Right,
    /// `S_n <= -x`
    Left,
    /// `S_n - E S_n >= x`
    CenteredRight,
    /// `S_n - E S_n <= -x`
    CenteredLeft,
    /// `|S_n - E S_n| >= x`
    CenteredAbs,
}

impl Side {
    pub fn is_centered(self) -> bool {
        matches!(self, Side::CenteredRight | Side::CenteredLeft | Side::CenteredAbs)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::CenteredRight => "centered_right",
            Side::CenteredLeft => "centered_left",
            Side::CenteredAbs => "centered_abs",
        }
    }
}

/// `n` summands drawn by cycling through `dists`, repeated `trials` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub dists: Vec<IntegerDistribution<f64>>,
    pub n: u64,
    pub trials: u64,
    pub epsilon: f64,
    pub side: Side,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTailEstimate {
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub threshold_x: f64,
    pub mean_used: Option<f64>,
}

/// An estimate together with the per-trial deviations it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub estimate: EmpiricalTailEstimate,
    /// `S_n - E S_n` for centered sides, `S_n` otherwise, in trial order.
    pub deviations: Vec<f64>,
}

impl ExperimentPlan {
    pub fn iid(dist: IntegerDistribution<f64>, n: u64, trials: u64, epsilon: f64, side: Side, seed: u64) -> Self {
        Self { dists: vec![dist], n, trials, epsilon, side, seed, workers: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dists.is_empty() {
            return invalid("plan needs at least one distribution");
        }
        if self.n < 2 {
            return invalid(format!("n must be at least 2, got {}", self.n));
        }
        if self.trials < MIN_TRIALS {
            return invalid(format!("trials must be at least {MIN_TRIALS}, got {}", self.trials));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.workers == 0 {
            return invalid("workers must be positive");
        }
        if self.side.is_centered() {
            if self.spec()?.regime() != RegimeTag::Concentrated {
                return invalid("centered sides need min(alpha_l, alpha_r) > 1");
            }
            self.mean()?;
        }
        Ok(())
    }

    /// Sequence certificate: minimum exponents, maximum constants.
    pub fn spec(&self) -> Result<TailClassSpec<f64>> {
        let specs: Vec<_> = self.dists.iter().map(|d| d.certified().clone()).collect();
        aggregate_sequence(&specs)
    }

    /// Exponent that sets the threshold for this side.
    pub fn side_alpha(&self) -> Result<f64> {
        let spec = self.spec()?;
        Ok(match self.side {
            Side::Right => spec.alpha_r(),
            Side::Left => spec.alpha_l().unwrap_or(spec.alpha_r()),
            _ => spec.min_alpha(),
        })
    }

    /// `x = n^(max(1/alpha, 1/2) + eps)`.
    pub fn threshold(&self) -> Result<f64> {
        let alpha = self.side_alpha()?;
        Ok((threshold_exponent(alpha, self.epsilon) * (self.n as f64).ln()).exp())
    }

    /// `E S_n` from the tail-sum formula of each summand.
    pub fn mean(&self) -> Result<f64> {
        let means = self
            .dists
            .iter()
            .map(|d| {
                d.expectation_tail_sum()
                    .finite()
                    .ok_or_else(|| Error::InvalidInput(format!("{} has no finite mean", d.label())))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = means.len() as u64;
        let (full, rest) = (self.n / m, (self.n % m) as usize);
        Ok(full as f64 * means.iter().sum::<f64>() + means[..rest].iter().sum::<f64>())
    }

    /// The closed-form theorem bound for this side.
    pub fn theorem_bound(&self) -> Result<BoundEvaluation<f64>> {
        let spec = self.spec()?;
        match self.side {
            Side::Right => thm1_bound(&spec, self.n, self.epsilon),
            Side::Left => thm2_bound(&spec, self.n, self.epsilon),
            Side::CenteredRight => thm3_bound(&spec, self.n, self.epsilon),
            Side::CenteredLeft => thm4_bound(&spec, self.n, self.epsilon),
            Side::CenteredAbs => {
                Ok(thm3_bound(&spec, self.n, self.epsilon)?.union_with(&thm4_bound(&spec, self.n, self.epsilon)?))
            }
        }
    }

    /// The finite-n bound for this side under the default schedule.
    pub fn preasymptotic(&self) -> Result<BoundEvaluation<f64>> {
        let specs: Vec<_> = self.dists.iter().map(|d| d.certified().clone()).collect();
        let alpha = self.side_alpha()?;
        let regime = RegimeTag::of_exponent(alpha);
        if self.side.is_centered() != (regime == RegimeTag::Concentrated) {
            return Err(Error::WrongRegime(format!(
                "side {} does not match the exponent {alpha}",
                self.side.as_str()
            )));
        }
        let schedule = MuSchedule::new(self.n, self.epsilon, alpha)?;
        match self.side {
            Side::Right | Side::CenteredRight => preasymptotic_bound(&specs, &schedule, TailSide::Right),
            Side::Left | Side::CenteredLeft => preasymptotic_bound(&specs, &schedule, TailSide::Left),
            Side::CenteredAbs => Ok(preasymptotic_bound(&specs, &schedule, TailSide::Right)?
                .union_with(&preasymptotic_bound(&specs, &schedule, TailSide::Left)?)),
        }
    }
}

/// `S_n` for trial `t`, drawn from the substream `(seed, t)`.
fn trial_sum(dists: &[IntegerDistribution<f64>], n: u64, seed: u64, trial: u64) -> i128 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut sum = 0i128;
    if let [d] = dists {
        for _ in 0..n {
            sum = sum.saturating_add(d.sample(&mut rng));
        }
    } else {
        for i in 0..n as usize {
            sum = sum.saturating_add(dists[i % dists.len()].sample(&mut rng));
        }
    }
    sum
}

/// Raw sums `S_n`, one per trial, in trial order for any worker count.
pub fn simulate_sums(plan: &ExperimentPlan) -> Result<Vec<i128>> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let (dists, n, seed) = (&plan.dists, plan.n, plan.seed);
    Ok(pool.install(|| (0..plan.trials).into_par_iter().map(|t| trial_sum(dists, n, seed, t)).collect()))
}

pub fn run_simulation(plan: &ExperimentPlan) -> Result<Simulation> {
    let sums = simulate_sums(plan)?;
    let x = plan.threshold()?;
    let mean_used = if plan.side.is_centered() { Some(plan.mean()?) } else { None };
    let shift = mean_used.unwrap_or(0.0);
    let deviations: Vec<f64> = sums.iter().map(|&s| s as f64 - shift).collect();
    let hits = deviations
        .iter()
        .filter(|&&d| match plan.side {
            Side::Right | Side::CenteredRight => d >= x,
            Side::Left | Side::CenteredLeft => d <= -x,
            Side::CenteredAbs => d.abs() >= x,
        })
        .count() as u64;
    let (ci_low, ci_high) = clopper_pearson(hits, plan.trials, 1.0 - CONFIDENCE);
    let estimate = EmpiricalTailEstimate {
        hits,
        trials: plan.trials,
        p_hat: hits as f64 / plan.trials as f64,
        ci_low,
        ci_high,
        threshold_x: x,
        mean_used,
    };
    Ok(Simulation { estimate, deviations })
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<EmpiricalTailEstimate> {
    Ok(run_simulation(plan)?.estimate)
}

/// Empirical `q`-quantile (lower, order-statistic definition) of `values`.
pub fn empirical_quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&q));
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = IntegerDistribution<f64>;

    #[test]
    fn point_mass_never_hits() {
        let plan = ExperimentPlan::iid(D::point_mass(0), 100, 100, 0.3, Side::Right, 7);
        let est = run_experiment(&plan).unwrap();
        assert_eq!((est.hits, est.p_hat), (0, 0.0));
        assert!(est.ci_high < 0.06);
    }

    #[test]
    fn point_mass_always_hits_when_forced() {
        // S_n = 5n = 500 >= 100^(1 + 0.3) ~ 398
        let plan = ExperimentPlan::iid(D::point_mass(5), 100, 100, 0.3, Side::Right, 7);
        assert_eq!(run_experiment(&plan).unwrap().p_hat, 1.0);
    }

    #[test]
    fn worker_count_does_not_change_sums() {
        let mut plan = ExperimentPlan::iid(D::exact_tail_pareto(0.9, 1.0).unwrap(), 50, 300, 0.2, Side::Right, 3);
        let one = simulate_sums(&plan).unwrap();
        plan.workers = 4;
        assert_eq!(one, simulate_sums(&plan).unwrap());
        plan.seed = 4;
        assert_ne!(one, simulate_sums(&plan).unwrap());
    }

    #[test]
    fn centered_needs_finite_mean() {
        let plan = ExperimentPlan::iid(D::exact_tail_pareto(0.9, 1.0).unwrap(), 50, 300, 0.2, Side::CenteredAbs, 3);
        assert!(matches!(run_experiment(&plan), Err(Error::InvalidInput(_))));
        let plan = ExperimentPlan::iid(D::point_mass(1), 50, 10, 0.2, Side::Right, 3);
        assert!(run_experiment(&plan).is_err());
    }

    #[test]
    fn cycled_mean() {
        let plan = ExperimentPlan {
            dists: vec![D::point_mass(2), D::point_mass(-1), D::geometric(0.5).unwrap()],
            n: 7,
            trials: 100,
            epsilon: 0.2,
            side: Side::Right,
            seed: 0,
            workers: 1,
        };
        // 2 full cycles of (2 - 1 + 2), then 2
        assert_eq!(plan.mean().unwrap(), 8.0);
    }

    #[test]
    fn quantile_order_statistic() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.99), 99.0);
        assert_eq!(empirical_quantile(&v, 1.0), 100.0);
        assert_eq!(empirical_quantile(&v, 0.0), 1.0);
    }
}
