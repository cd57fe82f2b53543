//! Closed forms used as test oracles.

use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{HarnessError, Result};

/// Absorption probabilities and mean duration of a biased walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinOutcome {
    /// Probability of hitting 0 before `b`.
    pub ruin: f64,
    /// Probability of hitting `b` before 0.
    pub win: f64,
    pub expected_steps: f64,
}

/// Walk on `0..=b` started at `s`, stepping up w.p. `p` and down otherwise.
///
/// With `r = (1-p)/p`:
/// `win = (r^s - 1)/(r^b - 1)`, `ruin = 1 - win`, and
/// `E[T] = s/(1-2p) - b/(1-2p) * (1 - r^s)/(1 - r^b)`.
pub fn gambler_ruin(p: f64, s: u32, b: u32) -> Result<RuinOutcome> {
    if !(p > 0.0 && p < 1.0) || p == 0.5 {
        return Err(HarnessError::Contract(format!(
            "p must lie in (0,1) without 1/2, got {p}"
        )));
    }
    if b == 0 || s > b {
        return Err(HarnessError::Contract(format!(
            "need 0 <= s <= b and b >= 1, got s = {s}, b = {b}"
        )));
    }
    let r = (1.0 - p) / p;
    let (rs, rb) = (r.powi(s as i32), r.powi(b as i32));
    let win = (rs - 1.0) / (rb - 1.0);
    let ruin = (rb - rs) / (rb - 1.0);
    let drift = 1.0 - 2.0 * p;
    let expected_steps = f64::from(s) / drift - f64::from(b) / drift * (1.0 - rs) / (1.0 - rb);
    Ok(RuinOutcome {
        ruin,
        win,
        expected_steps,
    })
}

/// Exact (Clopper–Pearson) two-sided binomial interval at level `1 - alpha`.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .expect("positive shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .expect("positive shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Standard error of a proportion estimated from `trials` draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorbing_ends() {
        let start = gambler_ruin(2.0 / 3.0, 0, 5).unwrap();
        assert_eq!(
            (start.ruin, start.win, start.expected_steps),
            (1.0, 0.0, 0.0)
        );
        let top = gambler_ruin(2.0 / 3.0, 5, 5).unwrap();
        assert_eq!((top.ruin, top.win), (0.0, 1.0));
        assert!(top.expected_steps.abs() < 1e-12);
    }

    #[test]
    fn reference_value() {
        let out = gambler_ruin(2.0 / 3.0, 6, 12).unwrap();
        let expect = (2f64.powi(-6) - 2f64.powi(-12)) / (1.0 - 2f64.powi(-12));
        assert!((out.ruin - expect).abs() < 1e-15);
        assert!((out.ruin - 0.015384).abs() < 1e-6);
        assert!((out.ruin + out.win - 1.0).abs() < 1e-15);
    }

    #[test]
    fn contract_violations() {
        assert!(gambler_ruin(0.5, 1, 2).is_err());
        assert!(gambler_ruin(0.0, 1, 2).is_err());
        assert!(gambler_ruin(0.7, 3, 2).is_err());
        assert!(gambler_ruin(0.7, 0, 0).is_err());
    }

    #[test]
    fn symmetric_walk_limit() {
        // As p -> 1/2 the ruin probability tends to 1 - s/b.
        let out = gambler_ruin(0.5 + 1e-5, 3, 12).unwrap();
        assert!((out.ruin - 0.75).abs() < 1e-3);
        assert!((out.expected_steps - 27.0).abs() < 1e-2);
    }

    #[test]
    fn clopper_pearson_brackets() {
        let (lo, hi) = clopper_pearson(0, 10, 0.05);
        assert_eq!(lo, 0.0);
        // Closed form for zero successes: 1 - (alpha/2)^(1/n).
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(10, 10, 0.05);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(37, 100, 0.05);
        assert!(lo < 0.37 && 0.37 < hi);
        assert_eq!(clopper_pearson(0, 0, 0.05), (0.0, 1.0));
    }
}
