//! Noisy binary search as a biased walk on an extended search tree.
//!
//! The leaves are the `2m + 1` cells of the breakpoint partition. Each leaf
//! hangs an infinite chain of copies of itself. At every step the walk
//! checks that the target lies inside the current node's range (one test
//! per finite bounding endpoint); on failure it retreats to the parent, on
//! success it descends: along the chain at a leaf, otherwise to the child
//! picked by one more comparison. After a fixed number of steps the cell of
//! the current node is returned.
//!
//! Each of those per-step tests is itself a boosted single comparison, so a
//! step moves the right way with probability about 0.7 at flip probability
//! 1/3. With raw answers the membership check alone would fail w.p. 5/9 on
//! the correct path and the walk would drift away from the target.

use crate::error::{check_open, Result};
use crate::geom::{Interval, Partition, PointId};
use crate::oracle::NoisyOracle;
use crate::primitives::boost::{boost_with, BoostThresholds};

/// Tunables of the search walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Walk length is `ceil(walk_constant * log2((m + 2) / delta))` steps.
    pub walk_constant: f64,
    /// Symmetric boosting margin of every comparison made by the walk.
    pub comparison_margin: u32,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            walk_constant: 4.0,
            comparison_margin: 3,
        }
    }
}

impl SearchParams {
    pub fn walk_steps(&self, breakpoints: usize, delta: f64) -> u64 {
        (self.walk_constant * ((breakpoints as f64 + 2.0) / delta).log2())
            .ceil()
            .max(1.0) as u64
    }
}

/// Which way a bound test compares target against breakpoint.
#[derive(Clone, Copy)]
enum BoundTest {
    /// Holds iff `breakpoint < target`.
    Above(PointId),
    /// Holds iff `!(target < breakpoint)`.
    AtLeast(PointId),
    /// Holds iff `target < breakpoint`.
    Below(PointId),
    /// Holds iff `!(breakpoint < target)`.
    AtMost(PointId),
}

struct Walk<'w, 'a> {
    target: PointId,
    dim: usize,
    breakpoints: &'w [PointId],
    leaves: usize,
    boost: BoostThresholds,
    oracle: &'w mut NoisyOracle<'a>,
}

impl Walk<'_, '_> {
    fn holds(&mut self, test: BoundTest) -> bool {
        let (target, dim) = (self.target, self.dim);
        let oracle = &mut *self.oracle;
        boost_with(self.boost, || match test {
            BoundTest::Above(b) => oracle.compare(b, target, dim),
            BoundTest::AtLeast(b) => !oracle.compare(target, b, dim),
            BoundTest::Below(b) => oracle.compare(target, b, dim),
            BoundTest::AtMost(b) => !oracle.compare(b, target, dim),
        })
        .verdict
    }

    /// Lower bound of a range starting at leaf `lo`.
    fn lower(&self, lo: usize) -> Option<BoundTest> {
        match lo {
            0 => None,
            _ if lo.is_multiple_of(2) => Some(BoundTest::Above(self.breakpoints[lo / 2 - 1])),
            _ => Some(BoundTest::AtLeast(self.breakpoints[lo / 2])),
        }
    }

    /// Upper bound of a range ending at leaf `hi`.
    fn upper(&self, hi: usize) -> Option<BoundTest> {
        if hi + 1 == self.leaves {
            None
        } else if hi.is_multiple_of(2) {
            Some(BoundTest::Below(self.breakpoints[hi / 2]))
        } else {
            Some(BoundTest::AtMost(self.breakpoints[hi / 2]))
        }
    }

    fn inside(&mut self, lo: usize, hi: usize) -> bool {
        if let Some(t) = self.lower(lo) {
            if !self.holds(t) {
                return false;
            }
        }
        match self.upper(hi) {
            Some(t) => self.holds(t),
            None => true,
        }
    }

    fn run(&mut self, steps: u64) -> usize {
        let mut ancestors: Vec<(usize, usize)> = Vec::new();
        let (mut lo, mut hi) = (0, self.leaves - 1);
        let mut chain_depth = 0u64;
        for _ in 0..steps {
            if !self.inside(lo, hi) {
                if chain_depth > 0 {
                    chain_depth -= 1;
                } else if let Some((plo, phi)) = ancestors.pop() {
                    (lo, hi) = (plo, phi);
                }
                // At the root there is no parent; the walk stays put.
                continue;
            }
            if lo == hi {
                chain_depth += 1;
                continue;
            }
            let mid = (lo + hi) / 2;
            let go_left = {
                let split = self
                    .upper(mid)
                    .expect("an inner split has a finite upper bound");
                self.holds(split)
            };
            ancestors.push((lo, hi));
            if go_left {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}

/// Cell index (in the `2m + 1` layout) the walk ends in. The breakpoints are
/// taken as given; no exact reads are made.
pub(crate) fn search_cell(
    target: PointId,
    dim: usize,
    breakpoints: &[PointId],
    delta: f64,
    params: &SearchParams,
    oracle: &mut NoisyOracle<'_>,
) -> usize {
    if breakpoints.is_empty() {
        return 0;
    }
    let mut walk = Walk {
        target,
        dim,
        breakpoints,
        leaves: 2 * breakpoints.len() + 1,
        boost: BoostThresholds::symmetric(params.comparison_margin),
        oracle,
    };
    walk.run(params.walk_steps(breakpoints.len(), delta))
}

/// Locates `target`'s coordinate `dim` among the cells induced by
/// `breakpoints` (which must be strictly increasing in that coordinate).
/// Wrong w.p. at most `delta`; an empty breakpoint list yields the whole line.
pub fn noisy_search(
    target: PointId,
    dim: usize,
    breakpoints: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Interval> {
    noisy_search_with(
        target,
        dim,
        breakpoints,
        delta,
        &SearchParams::default(),
        oracle,
    )
}

pub fn noisy_search_with(
    target: PointId,
    dim: usize,
    breakpoints: &[PointId],
    delta: f64,
    params: &SearchParams,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Interval> {
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let inst = oracle.instance();
    inst.check_id(target)?;
    let partition = Partition::from_sorted(inst, dim, breakpoints)?;
    let cell = search_cell(target, dim, breakpoints, delta, params, oracle);
    Ok(partition.cell(cell))
}
