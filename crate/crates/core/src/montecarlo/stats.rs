use statrs::distribution::{Beta, ContinuousCDF};

/// Exact two-sided Clopper–Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let a = 1.0 - confidence;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0).expect("valid shape").inverse_cdf(a / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf).expect("valid shape").inverse_cdf(1.0 - a / 2.0)
    };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_cases() {
        assert_eq!(clopper_pearson(0, 0, 0.95), (0.0, 1.0));
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        // Closed form at k = 0: 1 - (α/2)^{1/n}.
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-10);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-10);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn reference_value() {
        // scipy.stats.beta.ppf(0.025, 5, 16), beta.ppf(0.975, 6, 15)
        let (lo, hi) = clopper_pearson(5, 20, 0.95);
        assert!((lo - 0.086_571_469_101).abs() < 1e-9, "{lo}");
        assert!((hi - 0.491_045_871_708).abs() < 1e-9, "{hi}");
    }
}
