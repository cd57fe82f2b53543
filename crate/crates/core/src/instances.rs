//! Seeded instance families: uniform permutations, planted skylines, and
//! hard instances built from the null-vectors problem.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{skyline_exact, Instance, InstanceMeta, PointId};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::Generation(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Every column is an independent uniformly random permutation of `0..n`.
pub fn gen_uniform(n: usize, d: usize, seed: u64) -> Result<Instance> {
    check_positive("n", n)?;
    check_positive("d", d)?;
    let mut rng = rng_for(seed);
    let mut rows = vec![vec![0.0; d]; n];
    let mut column: Vec<usize> = (0..n).collect();
    for i in 0..d {
        column.shuffle(&mut rng);
        for (row, &v) in rows.iter_mut().zip(&column) {
            row[i] = v as f64;
        }
    }
    let inst = Instance::from_rows(rows)?;
    let sky = skyline_exact(&inst);
    Ok(inst.with_meta(InstanceMeta {
        family: Some("uniform".into()),
        seed: Some(seed),
        general_position: true,
        skyline_ids: Some(sky),
        reduction: None,
    }))
}

/// Replaces each column by the ranks of its values (ties broken by row).
fn rank_columns(rows: &mut [Vec<f64>]) {
    let d = rows.first().map_or(0, Vec::len);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    for i in 0..d {
        order.sort_by(|&a, &b| rows[a][i].total_cmp(&rows[b][i]).then(a.cmp(&b)));
        let ranks: Vec<usize> = {
            let mut r = vec![0; rows.len()];
            for (rank, &row) in order.iter().enumerate() {
                r[row] = rank;
            }
            r
        };
        for (row, rank) in rows.iter_mut().zip(ranks) {
            row[i] = rank as f64;
        }
    }
}

/// An instance whose skyline is exactly `k` planted points.
///
/// The maxima form a staircase in the first two coordinates (random in the
/// rest); every other point is a random maximum scaled down by an
/// independent factor in `(0, 1)` per coordinate. Columns are then replaced
/// by ranks, so each is a permutation of `0..n`. Point order is shuffled.
pub fn gen_fixed_skyline(n: usize, d: usize, k: usize, seed: u64) -> Result<Instance> {
    check_positive("n", n)?;
    check_positive("d", d)?;
    if k == 0 || k > n {
        return Err(Error::Generation(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if d == 1 && k > 1 {
        return Err(Error::Generation(format!(
            "a 1-dimensional instance has one maximum, asked for {k}"
        )));
    }
    let mut rng = rng_for(seed);
    let top = 2.0 * n as f64;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..k {
        let row: Vec<f64> = (0..d)
            .map(|i| match i {
                0 => top + j as f64,
                1 => top + (k - 1 - j) as f64,
                _ => top + rng.gen_range(0.0..top),
            })
            .collect();
        rows.push(row);
    }
    for _ in k..n {
        let parent = rng.gen_range(0..k);
        let row: Vec<f64> = rows[parent]
            .iter()
            .map(|&v| v * rng.gen_range(f64::EPSILON..1.0))
            .collect();
        rows.push(row);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut shuffled: Vec<Vec<f64>> = order.iter().map(|&o| rows[o].clone()).collect();
    rank_columns(&mut shuffled);
    let planted: Vec<PointId> = {
        let mut ids: Vec<PointId> = (0..n).filter(|&p| order[p] < k).collect();
        ids.sort_unstable();
        ids
    };

    let inst = Instance::from_rows(shuffled)?;
    let sky = skyline_exact(&inst);
    if sky != planted {
        return Err(Error::Generation(format!(
            "planted {k} maxima but the exact skyline has {} points (seed {seed})",
            sky.len()
        )));
    }
    Ok(inst.with_meta(InstanceMeta {
        family: Some("fixed-skyline".into()),
        seed: Some(seed),
        general_position: true,
        skyline_ids: Some(sky),
        reduction: None,
    }))
}

/// `k` vectors of length `ell` over `{0, 2}`, each with at most one `2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullVectorsInput {
    pub k: usize,
    pub ell: usize,
    /// Position of the single `2`, or `None` for a null vector. Serialized
    /// as an integer with `-1` for `None`.
    #[serde(serialize_with = "ser_positions", deserialize_with = "de_positions")]
    pub nonzero_positions: Vec<Option<usize>>,
}

fn ser_positions<S: Serializer>(v: &[Option<usize>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.map_or(-1, |x| x as i64)))
}

fn de_positions<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<Option<usize>>, D::Error> {
    let raw = Vec::<i64>::deserialize(d)?;
    raw.into_iter()
        .map(|x| match x {
            -1 => Ok(None),
            x if x >= 0 => Ok(Some(x as usize)),
            x => Err(serde::de::Error::custom(format!(
                "position {x} is neither -1 nor non-negative"
            ))),
        })
        .collect()
}

impl NullVectorsInput {
    pub fn new(ell: usize, nonzero_positions: Vec<Option<usize>>) -> Result<Self> {
        check_positive("ell", ell)?;
        check_positive("k", nonzero_positions.len())?;
        if let Some(bad) = nonzero_positions.iter().flatten().find(|&&p| p >= ell) {
            return Err(Error::Generation(format!(
                "nonzero position {bad} outside 0..{ell}"
            )));
        }
        Ok(Self {
            k: nonzero_positions.len(),
            ell,
            nonzero_positions,
        })
    }

    /// The vector `i` written out in full.
    pub fn vector(&self, i: usize) -> Vec<u8> {
        let mut v = vec![0; self.ell];
        if let Some(p) = self.nonzero_positions[i] {
            v[p] = 2;
        }
        v
    }

    /// `w_i = 0` for a null vector, `2` otherwise.
    pub fn answer(&self) -> Vec<u8> {
        self.nonzero_positions
            .iter()
            .map(|p| if p.is_some() { 2 } else { 0 })
            .collect()
    }
}

/// Each vector is null with probability 1/2, otherwise carries a single 2
/// at a uniformly random position.
pub fn gen_null_vectors(k: usize, ell: usize, seed: u64) -> Result<NullVectorsInput> {
    check_positive("k", k)?;
    check_positive("ell", ell)?;
    let mut rng = rng_for(seed);
    let positions = (0..k)
        .map(|_| rng.gen_bool(0.5).then(|| rng.gen_range(0..ell)))
        .collect();
    NullVectorsInput::new(ell, positions)
}

/// Where the reduction put each vector, recorded for decoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLayout {
    pub k: usize,
    pub ell: usize,
    pub blocks: usize,
    /// `marker_ids[i]`: the point carrying the single 1 in vector `i`'s column.
    pub marker_ids: Vec<PointId>,
    /// The true answer `w`.
    pub ground_truth: Vec<u8>,
    /// Rows holding the `2`s of two or more vectors of the same block.
    pub collisions: usize,
}

/// Builds the hard skyline instance of a null-vectors input.
///
/// Vector `j(d-2) + c` sits in column `c` of block `j` after an independent
/// random permutation of its entries. Block `j` contributes `ell` rows (row
/// `i` holds the `i`-th entries of its `d-2` vectors) followed by `d-2`
/// marker rows with a single 1; the last two coordinates are `j+1` and
/// `n-j-1` for every point of the block, so blocks are mutually
/// incomparable. The marker of a column is on the skyline iff its vector is
/// null, unless two vectors of the block collide on one row.
pub fn reduce_to_skyline(input: &NullVectorsInput, d: usize, seed: u64) -> Result<Instance> {
    if d < 3 {
        return Err(Error::Generation(format!(
            "the reduction needs d >= 3, got {d}"
        )));
    }
    let cols = d - 2;
    if !input.k.is_multiple_of(cols) {
        return Err(Error::Generation(format!(
            "d - 2 = {cols} does not divide k = {}",
            input.k
        )));
    }
    let blocks = input.k / cols;
    let (ell, n) = (input.ell, (input.ell + cols) * blocks);
    let mut rng = rng_for(seed);
    let permuted: Vec<Option<usize>> = input
        .nonzero_positions
        .iter()
        .map(|p| {
            // An independent permutation moves a single nonzero entry to a uniform row.
            let mut perm: Vec<usize> = (0..ell).collect();
            perm.shuffle(&mut rng);
            p.map(|x| perm[x])
        })
        .collect();

    let mut coords = vec![0.0; n * d];
    let mut marker_ids = vec![0; input.k];
    let mut collisions = 0;
    for j in 0..blocks {
        let base = j * (ell + cols);
        for p in base..base + ell + cols {
            coords[p * d + d - 2] = (j + 1) as f64;
            coords[p * d + d - 1] = (n - j - 1) as f64;
        }
        let mut hit_rows = BTreeSet::new();
        for c in 0..cols {
            let v = j * cols + c;
            if let Some(row) = permuted[v] {
                coords[(base + row) * d + c] = 2.0;
                if !hit_rows.insert(row) {
                    collisions += 1;
                }
            }
            let marker = base + ell + c;
            coords[marker * d + c] = 1.0;
            marker_ids[v] = marker;
        }
    }

    let rows = coords.chunks(d).map(<[f64]>::to_vec).collect();
    let inst = Instance::from_rows(rows)?;
    Ok(inst.with_meta(InstanceMeta {
        family: Some("null-vectors-reduction".into()),
        seed: Some(seed),
        general_position: false,
        skyline_ids: None,
        reduction: Some(ReductionLayout {
            k: input.k,
            ell,
            blocks,
            marker_ids,
            ground_truth: input.answer(),
            collisions,
        }),
    }))
}

/// `w_i = 0` iff the marker of vector `i` is in `sky`.
pub fn decode_skyline_to_answer(sky: &[PointId], layout: &ReductionLayout) -> Vec<u8> {
    let sky: BTreeSet<PointId> = sky.iter().copied().collect();
    layout
        .marker_ids
        .iter()
        .map(|m| if sky.contains(m) { 0 } else { 2 })
        .collect()
}
