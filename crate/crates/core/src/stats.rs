//! Small statistics helpers: binomial confidence intervals, sample moments
//! and the Kolmogorov-Smirnov distance.

/// Two-sided 97.5% standard-normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if errors == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let (s1, s2) = samples
            .iter()
            .fold((0.0, 0.0), |(a, b), &x| (a + x, b + x * x));
        Self {
            mean: s1 / n,
            second: s2 / n,
        }
    }

    /// E[X^2] / E[X]^2 - 1.
    pub fn scintillation_index(&self) -> f64 {
        self.second / (self.mean * self.mean) - 1.0
    }
}

/// Kolmogorov-Smirnov statistic of `sorted` samples against `cdf`.
pub fn ks_statistic<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let c = cdf(x);
        let lo = c - i as f64 / n;
        let hi = (i + 1) as f64 / n - c;
        d.max(lo).max(hi)
    })
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_and_handles_zero() {
        let (lo, hi) = wilson_interval(0, 1000, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(50, 1000, Z_95);
        assert!(lo < 0.05 && hi > 0.05);
        // textbook value: 50/1000 -> [0.0381, 0.0653]
        assert!((lo - 0.0381).abs() < 2e-4 && (hi - 0.0653).abs() < 2e-4);
        let (lo, hi) = wilson_interval(1000, 1000, Z_95);
        assert!(lo < 1.0 && hi == 1.0);
    }

    #[test]
    fn ks_of_uniform_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        let d = ks_statistic(&xs, |x| x * x);
        assert!(d > 0.2);
    }

    #[test]
    fn moments_of_constant() {
        let m = Moments::of(&[2.0; 10]);
        assert_eq!(m.mean, 2.0);
        assert!(m.scintillation_index().abs() < 1e-15);
    }
}
