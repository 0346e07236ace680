use statrs::function::beta::beta_reg;

/// Two-sided exact binomial interval for `hits` successes in `trials`, with
/// coverage `1 - alpha`.
pub fn clopper_pearson(hits: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials, "need 0 <= hits <= trials, trials > 0");
    let (h, n) = (hits as f64, trials as f64);
    let half = alpha / 2.0;
    let low = if hits == 0 {
        0.0
    } else if hits == trials {
        half.powf(1.0 / n)
    } else {
        // P[Bin(n, p) >= h] = I_p(h, n - h + 1)
        solve_increasing(|p| beta_reg(h, n - h + 1.0, p), half)
    };
    let high = if hits == trials {
        1.0
    } else if hits == 0 {
        1.0 - half.powf(1.0 / n)
    } else {
        // P[Bin(n, p) <= h] = 1 - I_p(h + 1, n - h)
        solve_increasing(|p| beta_reg(h + 1.0, n - h, p), 1.0 - half)
    };
    (low, high)
}

/// Root of `g(p) = target` on `[0, 1]` for increasing `g`, by bisection.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_hits_closed_form() {
        let (lo, hi) = clopper_pearson(0, 100, 0.01);
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi, 1.0 - 0.005f64.powf(0.01), max_relative = 1e-14);
        assert!(hi < 0.06);
    }

    #[test]
    fn matches_reference_values() {
        // scipy.stats.beta.ppf(0.005, 10, 91), beta.ppf(0.995, 11, 90)
        let (lo, hi) = clopper_pearson(10, 100, 0.01);
        assert_relative_eq!(lo, 0.038_195_653_205_081_55, max_relative = 1e-8);
        assert_relative_eq!(hi, 0.201_953_520_781_344_15, max_relative = 1e-8);
        let (lo, hi) = clopper_pearson(100, 100, 0.01);
        assert_relative_eq!(lo, 0.005f64.powf(0.01), max_relative = 1e-14);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn interval_contains_estimate_for_large_counts() {
        for (h, n) in [(1u64, 100_000u64), (11_000, 100_000), (99_999, 100_000), (3, 7)] {
            let (lo, hi) = clopper_pearson(h, n, 0.01);
            let p = h as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0, "{h}/{n}: [{lo}, {hi}]");
        }
    }
}
