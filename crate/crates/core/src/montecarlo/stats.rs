use crate::error::{Error, Result};
use crate::specfun::{std_normal_quantile, Probability};
use libm::{log, sqrt};

/// Event frequency with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRate {
    pub events: u64,
    pub trials: u64,
    pub estimate: Probability,
    pub ci_low: Probability,
    pub ci_high: Probability,
    pub confidence: f64,
}

impl EmpiricalRate {
    pub fn wilson(events: u64, trials: u64, confidence: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("trial count", 0.0));
        }
        if events > trials {
            return Err(Error::domain("event count", events as f64));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::domain("confidence level", confidence));
        }
        let z = std_normal_quantile(1.0 - 0.5 * (1.0 - confidence))?;
        let n = trials as f64;
        let p = events as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
        let low = (center - half).clamp(0.0, p);
        let high = (center + half).clamp(p, 1.0);
        Ok(EmpiricalRate {
            events,
            trials,
            estimate: Probability::saturating(p),
            ci_low: Probability::saturating(low),
            ci_high: Probability::saturating(high),
            confidence,
        })
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low.get() <= p && p <= self.ci_high.get()
    }

    /// Whether the interval meets `[lo, hi]`.
    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.ci_low.get() <= hi && lo <= self.ci_high.get()
    }
}

/// Kolmogorov–Smirnov distance between the sample and `cdf`. Sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Large-sample critical distance at significance `alpha`,
/// √(−ln(α/2) / (2n)).
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    sqrt(-log(0.5 * alpha) / (2.0 * n as f64))
}

/// Pooled two-proportion z statistic.
pub fn two_proportion_z(events_a: u64, trials_a: u64, events_b: u64, trials_b: u64) -> f64 {
    let (na, nb) = (trials_a as f64, trials_b as f64);
    let (pa, pb) = (events_a as f64 / na, events_b as f64 / nb);
    let pooled = (events_a + events_b) as f64 / (na + nb);
    let se = sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
    if se == 0.0 {
        return 0.0;
    }
    (pa - pb) / se
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn wilson_reference_value() {
        // 10 events in 1000 trials at 95%, reference from statsmodels
        let r = EmpiricalRate::wilson(10, 1000, 0.95).unwrap();
        assert!((r.ci_low.get() - 0.005_440_754_445_529_248).abs() < 1e-12);
        assert!((r.ci_high.get() - 0.018_309_468_870_314_774).abs() < 1e-12);
        assert_eq!(r.estimate.get(), 0.01);
    }

    #[test]
    fn wilson_zero_events() {
        let r = EmpiricalRate::wilson(0, 10_000, 0.99).unwrap();
        assert_eq!(r.ci_low.get(), 0.0);
        assert!(r.ci_high.get() > 0.0 && r.ci_high.get() < 1e-3);
        assert!(EmpiricalRate::wilson(1, 0, 0.99).is_err());
        assert!(EmpiricalRate::wilson(5, 4, 0.99).is_err());
        assert!(EmpiricalRate::wilson(1, 4, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn wilson_brackets_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
            let events = (frac * trials as f64) as u64;
            let r = EmpiricalRate::wilson(events, trials, conf).unwrap();
            prop_assert!(r.ci_low.get() <= r.estimate.get());
            prop_assert!(r.estimate.get() <= r.ci_high.get());
            prop_assert_eq!(r.estimate.get(), events as f64 / trials as f64);
        }
    }

    #[test]
    fn ks_against_uniform_grid() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!((d - 0.0005).abs() < 1e-12);
        assert!((ks_critical_value(100_000, 0.01) - 0.005_146).abs() < 1e-6);
    }

    #[test]
    fn two_proportion_symmetry() {
        assert_eq!(two_proportion_z(50, 1000, 50, 1000), 0.0);
        let z = two_proportion_z(60, 1000, 40, 1000);
        assert!((z + two_proportion_z(40, 1000, 60, 1000)).abs() < 1e-15);
        assert!(z > 0.0);
    }
}
