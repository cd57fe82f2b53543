use crate::error::{check_open, Result};

/// Stopping margins of the boosting walk.
///
/// The walk tracks `#true - #false` over repeated runs of a test and stops
/// at `+up` (answer true) or `-down` (answer false). Starting from the
/// lower barrier's point of view this is gambler's ruin from `down` with
/// absorbing barriers `0` and `up + down`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoostThresholds {
    pub up: u32,
    pub down: u32,
}

impl BoostThresholds {
    /// `up = ceil(log2(1/false_pos))`, `down = ceil(log2(1/false_neg))`;
    /// both budgets in `(0, 1/2)`.
    pub fn new(false_pos: f64, false_neg: f64) -> Result<Self> {
        check_open("delta1", false_pos, 0.0, 0.5, "(0, 1/2)")?;
        check_open("delta2", false_neg, 0.0, 0.5, "(0, 1/2)")?;
        Ok(Self::from_budgets(false_pos, false_neg))
    }

    /// Unchecked constructor for budgets derived from already validated ones.
    pub(crate) fn from_budgets(false_pos: f64, false_neg: f64) -> Self {
        Self {
            up: log2_ceil_inv(false_pos),
            down: log2_ceil_inv(false_neg),
        }
    }

    pub const fn symmetric(margin: u32) -> Self {
        Self {
            up: margin,
            down: margin,
        }
    }
}

/// `max(1, ceil(log2(1/x)))` for `x` in `(0, 1)`.
pub(crate) fn log2_ceil_inv(x: f64) -> u32 {
    debug_assert!(x > 0.0 && x < 1.0);
    let v = (1.0 / x).log2();
    // Guard against 1/2^j landing a hair above the integer.
    let rounded = v.round();
    let bits = if (v - rounded).abs() < 1e-9 {
        rounded
    } else {
        v.ceil()
    };
    (bits as u32).max(1)
}

/// Result of one boosted decision together with the number of test runs it took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoostOutcome {
    pub verdict: bool,
    pub runs: u64,
}

/// Runs `test` until the true/false margin hits `+up` or `-down`.
pub fn boost_with(thresholds: BoostThresholds, mut test: impl FnMut() -> bool) -> BoostOutcome {
    let (up, down) = (i64::from(thresholds.up), -i64::from(thresholds.down));
    let mut margin = 0i64;
    let mut runs = 0u64;
    loop {
        margin += if test() { 1 } else { -1 };
        runs += 1;
        if margin >= up {
            return BoostOutcome {
                verdict: true,
                runs,
            };
        }
        if margin <= down {
            return BoostOutcome {
                verdict: false,
                runs,
            };
        }
    }
}

/// Amplifies a test with constant error (at most 1/3 per run) into one that
/// is falsely true w.p. at most `delta1` and falsely false w.p. at most
/// `delta2`.
pub fn boost_prob(test: impl FnMut() -> bool, delta1: f64, delta2: f64) -> Result<bool> {
    Ok(boost_with(BoostThresholds::new(delta1, delta2)?, test).verdict)
}
