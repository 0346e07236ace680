use heavytail::montecarlo::{
    compare, run_experiment, run_simulation, simulate_sums, write_report_csv, ComparisonVerdict, ExperimentPlan,
    ReportRow, Side,
};
use heavytail::Distribution;

fn plan(dist: Distribution, n: u64, trials: u64, eps: f64, side: Side) -> ExperimentPlan {
    ExperimentPlan::iid(dist, n, trials, eps, side, 42)
}

#[test]
fn identical_plans_give_identical_estimates() {
    let mut p = plan(Distribution::symmetric_pareto(1.5).unwrap(), 200, 500, 0.2, Side::CenteredAbs);
    let a = run_experiment(&p).unwrap();
    assert_eq!(a, run_experiment(&p).unwrap());
    p.workers = 3;
    assert_eq!(a, run_experiment(&p).unwrap());
}

#[test]
fn sample_mean_converges_to_tail_sum_mean() {
    let cases = [
        (Distribution::geometric(0.3).unwrap(), (0.7f64) / 0.09),
        (Distribution::symmetric_pareto(2.5).unwrap(), f64::NAN),
        (Distribution::two_sided(Distribution::point_mass(4), Distribution::geometric(0.5).unwrap(), 0.25).unwrap(), f64::NAN),
    ];
    for (dist, known_var) in cases {
        let (n, trials) = (100u64, 2_000u64);
        let p = plan(dist.clone(), n, trials, 0.3, Side::CenteredRight);
        let sums = simulate_sums(&p).unwrap();
        let per: Vec<f64> = sums.iter().map(|&s| s as f64 / n as f64).collect();
        let mean = per.iter().sum::<f64>() / trials as f64;
        let var = if known_var.is_nan() {
            per.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64 * n as f64
        } else {
            known_var
        };
        let se = (var / (n * trials) as f64).sqrt();
        let want = dist.expectation_tail_sum().finite().unwrap();
        assert!((mean - want).abs() < 5.0 * se, "{}: {mean} vs {want} (se {se})", dist.label());
    }
}

#[test]
fn point_mass_outcomes_are_forced() {
    for (c, side, expected) in [(0, Side::Right, 0.0), (-7, Side::Left, 1.0), (-7, Side::Right, 0.0)] {
        let est = run_experiment(&plan(Distribution::point_mass(c), 100, 100, 0.3, side)).unwrap();
        assert_eq!(est.p_hat, expected, "c={c} {side:?}");
    }
}

#[test]
fn sublinear_pareto_respects_theorem_bound() {
    let p = plan(Distribution::exact_tail_pareto(0.8, 1.0).unwrap(), 200, 5_000, 0.4, Side::Right);
    let sim = run_simulation(&p).unwrap();
    let thm = p.theorem_bound().unwrap();
    assert_eq!(compare(&sim.estimate, &thm).unwrap(), ComparisonVerdict::BoundHolds);
    let pre = p.preasymptotic().unwrap();
    assert_ne!(compare(&sim.estimate, &pre).unwrap(), ComparisonVerdict::BoundViolated);
}

#[test]
fn left_side_mirrors_right_side() {
    let right = Distribution::exact_tail_pareto(0.9, 1.0).unwrap();
    let left = Distribution::two_sided(Distribution::point_mass(0), right.clone(), 0.0).unwrap();
    let a = run_experiment(&plan(right, 100, 1_000, 0.3, Side::Right)).unwrap();
    let b = run_experiment(&plan(left, 100, 1_000, 0.3, Side::Left)).unwrap();
    assert_eq!(a.hits, b.hits);
}

#[test]
fn centered_side_rejects_sublinear_laws() {
    let p = plan(Distribution::symmetric_pareto(0.9).unwrap(), 100, 100, 0.3, Side::CenteredAbs);
    assert!(run_experiment(&p).is_err());
    let p = plan(Distribution::symmetric_pareto(2.5).unwrap(), 100, 100, 0.3, Side::Right);
    assert!(p.preasymptotic().is_err());
}

#[test]
fn report_csv_columns() {
    let dist = Distribution::point_mass(0).with_certificate_exponent(1.0).unwrap();
    let p = plan(dist, 100, 100, 0.3, Side::Right);
    let est = run_experiment(&p).unwrap();
    let row = ReportRow::new(&p, &est, &p.theorem_bound().unwrap()).unwrap();
    let mut out = Vec::new();
    write_report_csv(&[row], &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dist_id,n,epsilon,side,trials,seed,x,hits,p_hat,ci_low,ci_high,bound_kind,bound_value,verdict"
    );
    assert!(lines.next().unwrap().starts_with("point(0),100,0.3,right,100,42,"));
}
