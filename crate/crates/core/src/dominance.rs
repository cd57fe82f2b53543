//! Noisy dominance machinery: pairwise and set dominance, lexicographic
//! comparison, lexicographic maximum among dominators, bucket membership
//! and bucket emptiness.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::error::{check_open, Error, Result};
use crate::geom::{Bucket, IntervalKind, PointId};
use crate::oracle::NoisyOracle;
use crate::primitives::boost::{boost_with, log2_ceil_inv, BoostThresholds};

fn inv(x: usize) -> f64 {
    1.0 / x as f64
}

/// Does `p` weakly dominate `q`? Wrong w.p. at most 1/16.
///
/// Per coordinate, `p_i < q_i` is boosted with budgets `(1/(16d), 1/16)`;
/// the first confirmed violation answers false.
pub fn dominates_noisy(p: PointId, q: PointId, oracle: &mut NoisyOracle<'_>) -> bool {
    let d = oracle.instance().dim();
    let boost = BoostThresholds::from_budgets(inv(16 * d), 1.0 / 16.0);
    (0..d).all(|i| !boost_with(boost, || oracle.compare(p, q, i)).verdict)
}

/// Is `q` weakly dominated by some member of `set`? Falsely true w.p. at
/// most `delta1`, falsely false w.p. at most `delta2`.
pub fn set_dominates(
    set: &[PointId],
    q: PointId,
    delta1: f64,
    delta2: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<bool> {
    check_open("delta1", delta1, 0.0, 0.5, "(0, 1/2)")?;
    check_open("delta2", delta2, 0.0, 0.5, "(0, 1/2)")?;
    if set.is_empty() {
        return Ok(false);
    }
    let boost = BoostThresholds::from_budgets(delta1 / set.len() as f64, delta2);
    Ok(set
        .iter()
        .any(|&p| boost_with(boost, || dominates_noisy(p, q, oracle)).verdict))
}

/// Is `p` lexicographically greater than `q`? Wrong w.p. at most 1/16.
/// Identical coordinates fall back to comparing ids, which is noise free.
///
/// # Panics
/// If `p == q`.
pub fn lex_noisy(p: PointId, q: PointId, oracle: &mut NoisyOracle<'_>) -> bool {
    assert_ne!(p, q, "lexicographic comparison of a point with itself");
    let d = oracle.instance().dim();
    let boost = BoostThresholds::from_budgets(inv(32 * d), 1.0 / 32.0);
    for i in 0..d {
        if boost_with(boost, || oracle.compare(q, p, i)).verdict {
            return true;
        }
        if boost_with(boost, || oracle.compare(p, q, i)).verdict {
            return false;
        }
    }
    p > q
}

/// Outcome of [`max_lex_traced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxLexOutcome {
    pub winner: PointId,
    pub iterations: u64,
    /// The iteration cap was hit before the stopping rule fired.
    pub capped: bool,
}

/// Which counter the lexicographic loser's penalty applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LoserPenalty {
    /// Charge the loser only when the winner is confirmed to dominate `p`.
    WhenWinnerDominates,
    /// Charge the loser on every comparison.
    Always,
}

/// Iteration cap `10 (|S| + 3) (L + 3)` with `L = ceil(log2(1/delta))`, the
/// counters' starting value.
pub fn max_lex_iteration_cap(set_len: usize, delta: f64) -> u64 {
    10 * (set_len as u64 + 3) * (u64::from(log2_ceil_inv(delta)) + 3)
}

/// Lexicographic maximum among the members of `set` that weakly dominate
/// `p`; correct w.p. at least `1 - delta`.
pub fn max_lex(
    p: PointId,
    set: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<PointId> {
    Ok(max_lex_traced(p, set, delta, oracle)?.winner)
}

/// [`max_lex`] with iteration accounting.
///
/// Every member starts with counter `L = ceil(log2(1/delta))`. Each round
/// pairs the two largest counters (ties to the lower id), orders them by
/// [`lex_noisy`] into winner `x` and loser `y` and tests
/// `dominates_noisy(x, p)`: on success `x` gains 1/2 and `y` loses 1,
/// otherwise `x` loses 1. The loop stops once the second counter of the
/// round is at most -2 and the largest counter wins.
///
/// Counters are kept in half-units so that all arithmetic is integral.
pub fn max_lex_traced(
    p: PointId,
    set: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<MaxLexOutcome> {
    max_lex_rule(p, set, delta, LoserPenalty::WhenWinnerDominates, oracle)
}

pub(crate) fn max_lex_rule(
    p: PointId,
    set: &[PointId],
    delta: f64,
    penalty: LoserPenalty,
    oracle: &mut NoisyOracle<'_>,
) -> Result<MaxLexOutcome> {
    check_open("delta", delta, 0.0, 0.5, "(0, 1/2)")?;
    if !set.contains(&p) {
        return Err(Error::UnknownPoint(p));
    }
    for &q in set {
        oracle.instance().check_id(q)?;
    }
    if set.len() == 1 {
        return Ok(MaxLexOutcome {
            winner: p,
            iterations: 0,
            capped: false,
        });
    }

    let start = 2 * i64::from(log2_ceil_inv(delta));
    let cap = max_lex_iteration_cap(set.len(), delta);
    let mut counter: HashMap<PointId, i64> = set.iter().map(|&q| (q, start)).collect();
    // Largest counter first, lower id first among equals.
    let mut ranking: BTreeSet<(Reverse<i64>, PointId)> =
        counter.iter().map(|(&q, &c)| (Reverse(c), q)).collect();

    let mut iterations = 0u64;
    let mut capped = false;
    loop {
        iterations += 1;
        let mut top = ranking.iter();
        let (_, q1) = *top.next().expect("at least two members");
        let (_, q2) = *top.next().expect("at least two members");
        let (x, y) = if lex_noisy(q1, q2, oracle) {
            (q1, q2)
        } else {
            (q2, q1)
        };
        let mut bump = |q: PointId, by: i64| {
            let c = counter.get_mut(&q).expect("member");
            ranking.remove(&(Reverse(*c), q));
            *c += by;
            ranking.insert((Reverse(*c), q));
        };
        let x_dominates = dominates_noisy(x, p, oracle);
        if x_dominates || penalty == LoserPenalty::Always {
            bump(y, -2);
        }
        bump(x, if x_dominates { 1 } else { -2 });

        if counter[&q2] <= -4 {
            break;
        }
        if iterations >= cap {
            capped = true;
            break;
        }
    }
    let (_, winner) = *ranking.iter().next().expect("nonempty");
    Ok(MaxLexOutcome {
        winner,
        iterations,
        capped,
    })
}

/// Is `p` inside bucket `b`? Wrong w.p. at most 1/16.
///
/// Per cell, each finite endpoint condition is boosted separately; a
/// violated condition is confirmed with budgets `(1/(16d), 1/16)` split
/// over the cell's tests.
pub fn in_bucket(p: PointId, b: &Bucket, oracle: &mut NoisyOracle<'_>) -> bool {
    let d = b.dim();
    let two_sided = BoostThresholds::from_budgets(inv(32 * d), 1.0 / 16.0);
    let one_sided = BoostThresholds::from_budgets(inv(16 * d), 1.0 / 16.0);
    for (i, cell) in b.cells.iter().enumerate() {
        let violated = match cell.kind {
            IntervalKind::WholeLine => false,
            IntervalKind::LeftUnbounded => {
                let hi = cell.hi.expect("bounded above").id;
                boost_with(one_sided, || !oracle.compare(p, hi, i)).verdict
            }
            IntervalKind::RightUnbounded => {
                let lo = cell.lo.expect("bounded below").id;
                boost_with(one_sided, || !oracle.compare(lo, p, i)).verdict
            }
            IntervalKind::OpenSpan => {
                let (lo, hi) = (cell.lo.expect("bounded").id, cell.hi.expect("bounded").id);
                boost_with(two_sided, || !oracle.compare(lo, p, i)).verdict
                    || boost_with(two_sided, || !oracle.compare(p, hi, i)).verdict
            }
            IntervalKind::Singleton => {
                let x = cell.lo.expect("bounded").id;
                boost_with(two_sided, || oracle.compare(p, x, i)).verdict
                    || boost_with(two_sided, || oracle.compare(x, p, i)).verdict
            }
        };
        if violated {
            return false;
        }
    }
    true
}

/// Does no member of `ys` lie in `b`? Falsely true w.p. at most `delta1`,
/// falsely false w.p. at most `delta2`.
pub fn is_empty(
    b: &Bucket,
    ys: &[PointId],
    delta1: f64,
    delta2: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<bool> {
    check_open("delta1", delta1, 0.0, 0.5, "(0, 1/2)")?;
    check_open("delta2", delta2, 0.0, 0.5, "(0, 1/2)")?;
    if ys.is_empty() {
        return Ok(true);
    }
    let boost = BoostThresholds::from_budgets(delta2 / ys.len() as f64, delta1);
    Ok(!ys
        .iter()
        .any(|&y| boost_with(boost, || in_bucket(y, b, oracle)).verdict))
}
