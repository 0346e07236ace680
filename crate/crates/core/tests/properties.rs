use heavytail::bounds::{thm1_bound, thm3_bound};
use heavytail::exact_engine::{interval_decomposition, mu_schedule, summation_by_parts_check, truncated_mgf};
use heavytail::tail_model::{aggregate_sequence, verify_membership, TailClassSpec, TailFunctions};
use heavytail::Distribution;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        (0.3f64..3.0, 0.05f64..=1.0).prop_map(|(a, v)| Distribution::exact_tail_pareto(a, v).unwrap()),
        (0.05f64..0.95).prop_map(|p| Distribution::geometric(p).unwrap()),
        (-5i64..=5).prop_map(Distribution::point_mass),
    ]
}

fn dist() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        leaf(),
        (leaf(), leaf(), 0.0f64..=1.0).prop_map(|(r, l, p)| Distribution::two_sided(r, l, p).unwrap()),
    ]
}

fn spec() -> impl Strategy<Value = TailClassSpec<f64>> {
    (0.2f64..4.0, 0.1f64..5.0, 0.2f64..4.0, 0.1f64..5.0)
        .prop_map(|(ar, v, al, w)| TailClassSpec::two_sided(ar, v, al, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pmf_is_tail_difference(d in dist(), k in -40i64..40) {
        let diff = d.prob_at_least(k) - d.prob_at_least(k + 1);
        prop_assert!((diff - d.pmf(k)).abs() <= 1e-14, "{} k={k}", d.label());
        prop_assert!((d.prob_at_most(k) + d.prob_at_least(k + 1) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn tails_are_monotone_probabilities(d in dist(), k in 1i64..10_000) {
        let (a, b) = (d.tail_plus(k), d.tail_plus(k + 1));
        prop_assert!((0.0..=1.0).contains(&a) && b <= a);
        let (a, b) = (d.tail_minus(k), d.tail_minus(k + 1));
        prop_assert!((0.0..=1.0).contains(&a) && b <= a);
    }

    #[test]
    fn default_certificates_hold(d in dist()) {
        let report = verify_membership(&d, d.certified(), 2_000).unwrap();
        prop_assert!(report.passed, "{}: {:?}", d.label(), report.first_violation);
    }

    #[test]
    fn summation_by_parts_polynomial(
        d in dist(),
        coeffs in prop::collection::vec(0.0f64..1.0, 1..4),
        a in 0i64..20,
        len in 0i64..30,
    ) {
        let f = |k: i64| coeffs.iter().rev().fold(0.0, |acc, c| acc * k as f64 + c);
        let r = summation_by_parts_check(&d, f, a, a + len);
        prop_assert!(r.diff <= 1e-12, "{r:?}");
    }

    #[test]
    fn summation_by_parts_exponential(d in dist(), mu in 0.0f64..0.2, a in 0i64..20, len in 0i64..30) {
        let r = summation_by_parts_check(&d, |k| (mu * k as f64).exp(), a, a + len);
        prop_assert!(r.diff <= 1e-12, "{r:?}");
    }

    #[test]
    fn aggregate_majorizes_members(specs in prop::collection::vec(spec(), 1..5), k in 1i64..1_000) {
        let agg = aggregate_sequence(&specs).unwrap();
        for s in &specs {
            prop_assert!(s.right_majorant(k) <= agg.right_majorant(k) * (1.0 + 1e-15));
            prop_assert!(s.left_majorant(k).unwrap() <= agg.left_majorant(k).unwrap() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn quantile_inverts_right_tail(d in dist(), u in 1e-9f64..=1.0) {
        let k = d.quantile(u) as i64;
        prop_assert!(d.prob_at_least(k) >= u);
        prop_assert!(d.prob_at_least(k + 1) < u);
    }

    #[test]
    fn partition_is_exact(d in dist(), n_exp in 2u32..5, eps in 0.1f64..0.6) {
        let alpha = d.certified().min_alpha();
        let s = mu_schedule(10u64.pow(n_exp), eps, alpha).unwrap();
        prop_assume!(s.mu < 1.0 && s.m_split < s.x && s.mu_x() < 700.0);
        let dec = interval_decomposition(&d, &s, d.certified()).unwrap();
        let total = truncated_mgf(&d, s.mu, s.x).unwrap();
        prop_assert!((dec.exact_total() - total).abs() <= 1e-10 * total.max(1.0));
        for m in dec.margins() {
            prop_assert!(m >= -1e-10, "{}: {dec:?}", d.label());
        }
    }

    #[test]
    fn theorem_bounds_decrease_in_n_and_eps(
        v in 0.1f64..3.0, a1 in 0.2f64..=1.0, a3 in 1.01f64..4.0,
        n in 2u64..1_000_000, eps in 0.01f64..1.0,
    ) {
        let s1 = TailClassSpec::symmetric(a1, v).unwrap();
        let s3 = TailClassSpec::symmetric(a3, v).unwrap();
        let cases: [(fn(&TailClassSpec<f64>, u64, f64) -> heavytail::Result<heavytail::Bound>, _); 2] =
            [(thm1_bound, &s1), (thm3_bound, &s3)];
        for (bound, s) in cases {
            let base = bound(s, n, eps).unwrap().raw_value;
            prop_assert!(bound(s, n * 2, eps).unwrap().raw_value < base);
            prop_assert!(bound(s, n, eps * 1.5).unwrap().raw_value < base);
        }
    }

    #[test]
    fn json_round_trip(d in dist()) {
        let text = serde_json::to_string(&d).unwrap();
        let back: Distribution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn schedule_asymptotics_over_decades() {
    for alpha in [0.5, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0] {
        for eps in [0.1, 0.3, 0.5] {
            let seq: Vec<_> = (2..=7).map(|e| mu_schedule(10u64.pow(e), eps, alpha).unwrap()).collect();
            for w in seq.windows(2) {
                assert!(w[1].mu < w[0].mu, "mu not decreasing at alpha={alpha} eps={eps}");
                assert!(w[1].mu_x() > w[0].mu_x(), "mu x not increasing at alpha={alpha} eps={eps}");
            }
        }
    }
}
