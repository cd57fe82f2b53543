//! Skyline algorithms under noisy comparisons.
//!
//! All algorithms take the point set as a list of ids of the oracle's
//! instance, so a reduced sub-problem is just a shorter id list. Outputs
//! are returned as sorted id lists.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::{is_empty, max_lex, set_dominates};
use crate::error::{check_open, Error, Result};
use crate::geom::{cell_key_dominates, Bucket, Emptiness, Partition, PointId};
use crate::oracle::{derive_seed, NoisyOracle, Phase};
use crate::primitives::search::{search_cell, SearchParams};
use crate::primitives::sort::{dedupe_sorted, noisy_sort_with};

/// Overrides that let the bucketing path run on desk-sized inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestModeConstants {
    /// Replaces `floor(d/delta)^2` as the value squared by the first guess.
    pub initial_k: u64,
    /// Multiplies the sample size `d k^2 log2(d^2 k^2 / delta')`.
    pub sample_size_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// The bucketing path is skipped when `k^g >= n` or `d^g >= n`.
    pub guard_exponent: u32,
    /// Bucketing restarts allowed before falling back to [`sky_gm`].
    pub restart_cap: u32,
    pub test_mode: Option<TestModeConstants>,
    /// Seed of the sample draws; restart `r` uses `derive_seed(sample_seed, r)`.
    pub sample_seed: u64,
    #[serde(skip)]
    pub search: SearchParams,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            guard_exponent: 5,
            restart_cap: 16,
            test_mode: None,
            sample_seed: 0,
            search: SearchParams::default(),
        }
    }
}

impl AlgoConfig {
    /// Guard exponent 2, first guess squared from 2, samples at 5% of the
    /// nominal size.
    pub fn test_mode() -> Self {
        Self {
            guard_exponent: 2,
            test_mode: Some(TestModeConstants {
                initial_k: 2,
                sample_size_scale: 0.05,
            }),
            ..Self::default()
        }
    }

    pub fn with_sample_seed(mut self, seed: u64) -> Self {
        self.sample_seed = seed;
        self
    }
}

fn check_delta(delta: f64) -> Result<()> {
    check_open("delta", delta, 0.0, 0.5, "(0, 1/2)")
}

fn check_ids(ids: &[PointId], oracle: &NoisyOracle<'_>) -> Result<()> {
    ids.iter()
        .try_for_each(|&id| oracle.instance().check_id(id))
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::Parameter {
            name: "k",
            value: 0.0,
            range: "k >= 1",
        })
    } else {
        Ok(())
    }
}

/// Sort every coordinate with budget `delta / d`, then read the skyline off
/// the rank vectors without further queries.
pub fn sky_gm(
    points: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    sky_gm_with(points, delta, &SearchParams::default(), oracle)
}

pub(crate) fn sky_gm_with(
    points: &[PointId],
    delta: f64,
    search: &SearchParams,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    check_ids(points, oracle)?;
    let d = oracle.instance().dim();
    let n = points.len();
    // ranks[slot * d + i] = position of points[slot] in the dimension-i order.
    let slot: BTreeMap<PointId, usize> = points.iter().enumerate().map(|(s, &p)| (p, s)).collect();
    let mut ranks = vec![0usize; n * d];
    oracle.with_phase(Phase::Sort, |oracle| -> Result<()> {
        for i in 0..d {
            let order = noisy_sort_with(points, i, delta / d as f64, search, oracle)?;
            for (rank, p) in order.into_iter().enumerate() {
                ranks[slot[&p] * d + i] = rank;
            }
        }
        Ok(())
    })?;
    let row = |s: usize| &ranks[s * d..(s + 1) * d];
    let mut sky: Vec<PointId> = (0..n)
        .filter(|&s| !(0..n).any(|t| t != s && row(t).iter().zip(row(s)).all(|(a, b)| a >= b)))
        .map(|s| points[s])
        .collect();
    sky.sort_unstable();
    Ok(sky)
}

/// Finds up to `k` skyline points one at a time: scan the candidates for
/// one not dominated by the points found so far, then climb to the
/// lexicographically largest candidate dominating it.
///
/// Returns the whole skyline w.p. at least `1 - delta` when
/// `k >= |skyline|`.
pub fn skyline_high_dim(
    k: u64,
    points: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    check_k(k)?;
    check_delta(delta)?;
    check_ids(points, oracle)?;
    let n = points.len().max(1) as f64;
    let kf = k as f64;
    let (miss_budget, keep_budget, lex_budget) = (
        delta / (4.0 * kf),
        delta / (4.0 * kf * n),
        delta / (2.0 * kf),
    );

    let mut found: Vec<PointId> = Vec::new();
    let mut candidates: VecDeque<PointId> = points.iter().copied().collect();
    for _ in 0..k {
        let free = oracle.with_phase(Phase::Domination, |oracle| -> Result<Option<PointId>> {
            while let Some(&p) = candidates.front() {
                if !set_dominates(&found, p, miss_budget, keep_budget, oracle)? {
                    return Ok(Some(p));
                }
                candidates.pop_front();
            }
            Ok(None)
        })?;
        let Some(p) = free else { break };
        let pool = candidates.make_contiguous();
        let top =
            oracle.with_phase(Phase::MaxLex, |oracle| max_lex(p, pool, lex_budget, oracle))?;
        found.push(top);
        candidates.retain(|&c| c != top);
    }
    found.sort_unstable();
    Ok(found)
}

/// One call of a guess schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuessRound {
    pub k: u64,
    pub delta: f64,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessReport {
    pub output: Vec<PointId>,
    pub rounds: Vec<GuessRound>,
}

/// Doubling schedule `k = 2, 4, 8, ...` with budget `delta / 8^j` in round
/// `j`, stopping as soon as fewer than `k` points come back.
pub fn guess_skyline_high_dim(
    points: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    Ok(guess_skyline_high_dim_traced(points, delta, oracle)?.output)
}

pub fn guess_skyline_high_dim_traced(
    points: &[PointId],
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<GuessReport> {
    check_delta(delta)?;
    let mut rounds = Vec::new();
    let mut k = 1u64;
    let mut budget = delta;
    loop {
        k = k.saturating_mul(2);
        budget /= 8.0;
        let output = skyline_high_dim(k, points, budget, oracle)?;
        rounds.push(GuessRound {
            k,
            delta: budget,
            found: output.len(),
        });
        if (output.len() as u64) < k {
            return Ok(GuessReport { output, rounds });
        }
    }
}

/// Which branch produced the result of [`skyline_low_dim_traced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowDimPath {
    /// `k^g >= n` or `d^g >= n`: solved by [`sky_gm`].
    Guard,
    /// Bucketing, elimination and the reduced problem ran to completion.
    Bucketed,
    /// Too many restarts; solved by [`sky_gm`].
    Fallback,
}

/// Diagnostics of one bucketing pass (the last one when restarts occurred).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketingTrace {
    pub sample_size: usize,
    /// Breakpoint ids per dimension after duplicate removal, in sorted order.
    pub breakpoints: Vec<Vec<PointId>>,
    /// Per dimension, the largest number of distinct true coordinate values
    /// that landed in one cell (read exactly, for diagnostics only).
    pub max_distinct_per_cell: Vec<usize>,
    pub buckets: usize,
    /// Cell-index keys of the buckets handed to the emptiness test, in order.
    pub tested: Vec<Vec<u32>>,
    pub nonempty: usize,
    pub reduced_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowDimReport {
    pub output: Vec<PointId>,
    pub path: LowDimPath,
    pub restarts: u32,
    pub delta_prime: f64,
    pub trace: Option<BucketingTrace>,
}

impl LowDimReport {
    /// The decent-assignment bound `4n / (d k^2)` on distinct values per cell.
    pub fn decent_bound(n: usize, d: usize, k: u64) -> f64 {
        4.0 * n as f64 / (d as f64 * (k as f64).powi(2))
    }
}

/// `a^e >= n` without overflow.
fn pow_reaches(a: u64, e: u32, n: usize) -> bool {
    a.checked_pow(e).is_none_or(|v| v >= n as u64)
}

/// Skyline for a known bound `k >= |skyline|` by bucketing.
pub fn skyline_low_dim(
    k: u64,
    points: &[PointId],
    delta: f64,
    cfg: &AlgoConfig,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    Ok(skyline_low_dim_traced(k, points, delta, cfg, oracle)?.output)
}

/// [`skyline_low_dim`] with a report of the branch taken.
///
/// With `delta' = delta / (2dk)^5` and `s = d k^2 log2(d^2 k^2 / delta')`:
/// (i) per dimension noisy-sort and dedupe a uniform sample of size `s`
/// (budget `delta'/d` each) and noisy-search every point into the induced
/// cells (budget `delta'/(dk)`); (ii) test buckets for emptiness from the
/// top of the dominance order down, skipping any bucket below a non-empty
/// one, and restart if more than `n / log2 n` come back non-empty;
/// (iii) run [`skyline_high_dim`] on the points of the non-empty buckets.
pub fn skyline_low_dim_traced(
    k: u64,
    points: &[PointId],
    delta: f64,
    cfg: &AlgoConfig,
    oracle: &mut NoisyOracle<'_>,
) -> Result<LowDimReport> {
    check_k(k)?;
    check_delta(delta)?;
    check_ids(points, oracle)?;
    let n = points.len();
    let d = oracle.instance().dim();
    let delta_prime = delta / (2.0 * d as f64 * k as f64).powi(5);

    let guard =
        pow_reaches(k, cfg.guard_exponent, n) || pow_reaches(d as u64, cfg.guard_exponent, n);
    if guard || delta_prime <= 0.0 {
        let output = sky_gm_with(
            points,
            delta_prime.max(f64::MIN_POSITIVE),
            &cfg.search,
            oracle,
        )?;
        return Ok(LowDimReport {
            output,
            path: LowDimPath::Guard,
            restarts: 0,
            delta_prime,
            trace: None,
        });
    }

    let kf = k as f64;
    let nominal = d as f64 * kf * kf * ((d as f64 * d as f64 * kf * kf) / delta_prime).log2();
    let scale = cfg.test_mode.map_or(1.0, |t| t.sample_size_scale);
    let sample_size = ((scale * nominal).ceil().max(1.0) as usize).min(n);

    let mut restarts = 0u32;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.sample_seed, u64::from(restarts)));
        let mut trace = BucketingTrace {
            sample_size,
            ..BucketingTrace::default()
        };
        let buckets = oracle.with_phase(Phase::Bucketing, |oracle| {
            bucketing(
                points,
                sample_size,
                k,
                delta_prime,
                cfg,
                &mut rng,
                &mut trace,
                oracle,
            )
        })?;
        let survivors = oracle.with_phase(Phase::Elimination, |oracle| {
            eliminate(buckets, n, k, delta_prime, &mut trace, oracle)
        })?;
        match survivors {
            Some(reduced) => {
                trace.reduced_size = reduced.len();
                let output = skyline_high_dim(k, &reduced, delta_prime, oracle)?;
                return Ok(LowDimReport {
                    output,
                    path: LowDimPath::Bucketed,
                    restarts,
                    delta_prime,
                    trace: Some(trace),
                });
            }
            None if restarts >= cfg.restart_cap => {
                let output = sky_gm_with(points, delta_prime, &cfg.search, oracle)?;
                return Ok(LowDimReport {
                    output,
                    path: LowDimPath::Fallback,
                    restarts,
                    delta_prime,
                    trace: Some(trace),
                });
            }
            None => restarts += 1,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn bucketing(
    points: &[PointId],
    sample_size: usize,
    k: u64,
    delta_prime: f64,
    cfg: &AlgoConfig,
    rng: &mut ChaCha8Rng,
    trace: &mut BucketingTrace,
    oracle: &mut NoisyOracle<'_>,
) -> Result<BTreeMap<Vec<u32>, Bucket>> {
    let inst = oracle.instance();
    let d = inst.dim();
    let n = points.len();
    let per_dim = delta_prime / d as f64;
    let per_point = delta_prime / (d as f64 * k as f64);

    let mut partitions = Vec::with_capacity(d);
    for i in 0..d {
        let drawn: Vec<PointId> = sample(rng, n, sample_size)
            .into_iter()
            .map(|s| points[s])
            .collect();
        let sorted = noisy_sort_with(&drawn, i, per_dim, &cfg.search, oracle)?;
        let distinct = dedupe_sorted(&sorted, i, per_dim, oracle)?;
        trace.breakpoints.push(distinct.clone());
        partitions.push(distinct);
    }

    let mut assigned: BTreeMap<Vec<u32>, Vec<PointId>> = BTreeMap::new();
    for &p in points {
        let key: Vec<u32> = (0..d)
            .map(|i| search_cell(p, i, &partitions[i], per_point, &cfg.search, oracle) as u32)
            .collect();
        assigned.entry(key).or_default().push(p);
    }

    trace.max_distinct_per_cell = (0..d)
        .map(|i| {
            let mut per_cell: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
            for (key, members) in &assigned {
                per_cell
                    .entry(key[i])
                    .or_default()
                    .extend(members.iter().map(|&p| inst.coord(p, i)));
            }
            per_cell
                .into_values()
                .map(|mut vals| {
                    vals.sort_by(f64::total_cmp);
                    vals.dedup();
                    vals.len()
                })
                .max()
                .unwrap_or(0)
        })
        .collect();
    trace.buckets = assigned.len();

    let grids: Vec<Partition> = (0..d)
        .map(|i| Partition::from_sorted_unchecked(inst, i, &partitions[i]))
        .collect();
    Ok(assigned
        .into_iter()
        .map(|(key, members)| {
            let cells = key
                .iter()
                .zip(&grids)
                .map(|(&c, grid)| grid.cell(c as usize))
                .collect();
            let mut bucket = Bucket::new(cells);
            bucket.assigned = members;
            (key, bucket)
        })
        .collect())
}

/// Emptiness tests in dominance order. `None` signals a restart.
fn eliminate(
    buckets: BTreeMap<Vec<u32>, Bucket>,
    n: usize,
    k: u64,
    delta_prime: f64,
    trace: &mut BucketingTrace,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Option<Vec<PointId>>> {
    let limit = n as f64 / (n as f64).log2();
    let mut order: Vec<(Vec<u32>, Bucket)> = buckets.into_iter().collect();
    // A dominator has a strictly larger index sum, so it is always decided first.
    order.sort_by(|(a, _), (b, _)| {
        let sum = |key: &[u32]| key.iter().map(|&c| u64::from(c)).sum::<u64>();
        sum(b).cmp(&sum(a)).then_with(|| a.cmp(b))
    });

    let mut nonempty: Vec<usize> = Vec::new();
    for idx in 0..order.len() {
        let blocked = nonempty
            .iter()
            .any(|&j| cell_key_dominates(&order[j].0, &order[idx].0));
        if blocked {
            continue;
        }
        let bucket = &order[idx].1;
        let empty = is_empty(
            bucket,
            &bucket.assigned,
            delta_prime / k as f64,
            delta_prime / n as f64,
            oracle,
        )?;
        trace.tested.push(order[idx].0.clone());
        order[idx].1.emptiness = if empty {
            Emptiness::Empty
        } else {
            Emptiness::NonEmpty
        };
        if !empty {
            nonempty.push(idx);
            if nonempty.len() as f64 > limit {
                trace.nonempty = nonempty.len();
                return Ok(None);
            }
        }
    }
    trace.nonempty = nonempty.len();
    let mut reduced: Vec<PointId> = nonempty
        .iter()
        .flat_map(|&j| order[j].1.assigned.iter().copied())
        .collect();
    reduced.sort_unstable();
    Ok(Some(reduced))
}

/// Squaring schedule: start from `floor(d/delta)^2` (at least 4), then
/// repeatedly halve the budget, square `k` and call [`skyline_low_dim`]
/// until fewer than `k` points come back.
pub fn guess_skyline_low_dim(
    points: &[PointId],
    delta: f64,
    cfg: &AlgoConfig,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    Ok(guess_skyline_low_dim_traced(points, delta, cfg, oracle)?.output)
}

/// First value of the squaring schedule, before the first squaring.
pub fn low_dim_initial_k(d: usize, delta: f64, cfg: &AlgoConfig) -> u64 {
    let base = match cfg.test_mode {
        Some(t) => t.initial_k,
        None => {
            let ratio = (d as f64 / delta).floor() as u64;
            ratio.saturating_mul(ratio)
        }
    };
    if base < 4 && cfg.test_mode.is_none() {
        4
    } else {
        base.max(2)
    }
}

pub fn guess_skyline_low_dim_traced(
    points: &[PointId],
    delta: f64,
    cfg: &AlgoConfig,
    oracle: &mut NoisyOracle<'_>,
) -> Result<GuessReport> {
    check_delta(delta)?;
    let mut k = low_dim_initial_k(oracle.instance().dim(), delta, cfg);
    let mut budget = delta;
    let mut rounds = Vec::new();
    loop {
        budget /= 2.0;
        k = k.saturating_mul(k);
        let output = skyline_low_dim(k, points, budget, cfg, oracle)?;
        rounds.push(GuessRound {
            k,
            delta: budget,
            found: output.len(),
        });
        if (output.len() as u64) < k {
            return Ok(GuessReport { output, rounds });
        }
    }
}
