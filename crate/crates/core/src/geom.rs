//! Points, instances, one-dimensional cells and buckets, plus the exact
//! (noise-free) dominance and skyline computations used as ground truth.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::ReductionLayout;

pub type PointId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: PointId,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(id: PointId, coords: Vec<f64>) -> Self {
        Self { id, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Generator record attached to an instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Set when every coordinate column holds pairwise distinct values.
    #[serde(default)]
    pub general_position: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skyline_ids: Option<Vec<PointId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionLayout>,
}

/// A point set in `d` dimensions. Ids are the contiguous range `0..n`.
///
/// Coordinates are stored row-major in one flat buffer; `coords(id)` hands
/// out the row of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    dim: usize,
    coords: Vec<f64>,
    meta: InstanceMeta,
}

impl Instance {
    /// Builds an instance from coordinate rows; row `i` becomes point `i`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInstance("no points".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInstance(
                "dimension must be at least 1".into(),
            ));
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (id, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInstance(format!(
                    "point {id} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|c| c.is_nan()) {
                return Err(Error::InvalidInstance(format!(
                    "point {id} has a NaN coordinate"
                )));
            }
            coords.extend(row);
        }
        Ok(Self {
            dim,
            coords,
            meta: InstanceMeta::default(),
        })
    }

    /// Builds an instance from explicit points; ids must be a permutation of `0..n`.
    pub fn from_points(mut points: Vec<Point>) -> Result<Self> {
        points.sort_by_key(|p| p.id);
        for (expected, p) in points.iter().enumerate() {
            if p.id != expected {
                return Err(Error::InvalidInstance(format!(
                    "point ids must be distinct and contiguous from 0; missing id {expected}"
                )));
            }
        }
        Self::from_rows(points.into_iter().map(|p| p.coords).collect())
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut InstanceMeta {
        &mut self.meta
    }

    pub fn ids(&self) -> Vec<PointId> {
        (0..self.len()).collect()
    }

    pub fn contains(&self, id: PointId) -> bool {
        id < self.len()
    }

    /// Coordinate row of point `id`.
    ///
    /// # Panics
    /// If `id` is not a point of this instance.
    pub fn coords(&self, id: PointId) -> &[f64] {
        assert!(self.contains(id), "unknown point id {id}");
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    /// Row-major coordinate buffer.
    pub(crate) fn flat_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, id: PointId, dim: usize) -> f64 {
        self.coords(id)[dim]
    }

    pub fn point(&self, id: PointId) -> Point {
        Point::new(id, self.coords(id).to_vec())
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|id| self.point(id))
    }

    pub fn check_id(&self, id: PointId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownPoint(id))
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim < self.dim {
            Ok(())
        } else {
            Err(Error::DimOutOfRange { dim, d: self.dim })
        }
    }

    /// True iff every coordinate column holds pairwise distinct values.
    pub fn is_general_position(&self) -> bool {
        (0..self.dim).all(|dim| {
            let mut column: Vec<f64> = (0..self.len()).map(|id| self.coord(id, dim)).collect();
            column.sort_by(f64::total_cmp);
            column.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Validator for the general-position contract of the noisy algorithms.
    pub fn validate_general_position(&self) -> Result<()> {
        if self.is_general_position() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(
                "instance is not in general position".into(),
            ))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }
}

/// On-disk layout: `{n, d, points: [{id, coords}], meta}` in that order.
#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    d: usize,
    points: Vec<Point>,
    #[serde(default)]
    meta: InstanceMeta,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        Self {
            n: inst.len(),
            d: inst.dim(),
            points: inst.points().collect(),
            meta: inst.meta.clone(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.points.len() != file.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} points listed",
                file.n,
                file.points.len()
            )));
        }
        let inst = Instance::from_points(file.points)?;
        if inst.dim() != file.d {
            return Err(Error::InvalidInstance(format!(
                "d = {} but points have {} coordinates",
                file.d,
                inst.dim()
            )));
        }
        Ok(inst.with_meta(file.meta))
    }
}

fn assert_same_dim(p: &[f64], q: &[f64]) {
    assert_eq!(
        p.len(),
        q.len(),
        "dimension mismatch: {} vs {}",
        p.len(),
        q.len()
    );
}

/// `p` weakly dominates `q`: `q_i <= p_i` in every coordinate.
///
/// # Panics
/// On dimension mismatch.
pub fn dominates_exact(p: &[f64], q: &[f64]) -> bool {
    assert_same_dim(p, q);
    p.iter().zip(q).all(|(a, b)| b <= a)
}

/// Weak dominance plus at least one strict coordinate.
pub fn strictly_dominates_exact(p: &[f64], q: &[f64]) -> bool {
    assert_same_dim(p, q);
    let mut strict = false;
    for (a, b) in p.iter().zip(q) {
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

/// Lexicographic order with the point id as final tie-break.
///
/// # Panics
/// If both points carry the same id, or on dimension mismatch.
pub fn lex_greater_exact(p: &Point, q: &Point) -> bool {
    assert_ne!(
        p.id, q.id,
        "lexicographic comparison of a point with itself"
    );
    lex_cmp(&p.coords, p.id, &q.coords, q.id) == Ordering::Greater
}

pub(crate) fn lex_cmp(p: &[f64], p_id: PointId, q: &[f64], q_id: PointId) -> Ordering {
    assert_same_dim(p, q);
    for (a, b) in p.iter().zip(q) {
        match a.total_cmp(b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    p_id.cmp(&q_id)
}

/// Brute-force skyline of the whole instance, ids in increasing order.
pub fn skyline_exact(inst: &Instance) -> Vec<PointId> {
    skyline_exact_of(inst, &inst.ids())
}

/// Brute-force skyline of the sub-collection `ids`; pairwise scan, O(|ids|^2 d).
pub fn skyline_exact_of(inst: &Instance, ids: &[PointId]) -> Vec<PointId> {
    let mut sky: Vec<PointId> = ids
        .iter()
        .copied()
        .filter(|&p| {
            let pc = inst.coords(p);
            !ids.iter()
                .any(|&q| q != p && strictly_dominates_exact(inst.coords(q), pc))
        })
        .collect();
    sky.sort_unstable();
    sky.dedup();
    sky
}

/// Lex-greatest point of `candidates` that weakly dominates `p`.
pub fn lex_max_dominator_exact(
    inst: &Instance,
    p: PointId,
    candidates: &[PointId],
) -> Option<PointId> {
    let pc = inst.coords(p);
    candidates
        .iter()
        .copied()
        .filter(|&q| dominates_exact(inst.coords(q), pc))
        .max_by(|&a, &b| lex_cmp(inst.coords(a), a, inst.coords(b), b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    OpenSpan,
    Singleton,
    LeftUnbounded,
    RightUnbounded,
    WholeLine,
}

/// A breakpoint: the coordinate of an instance point, remembered together
/// with the point so that membership can later be re-tested by queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub id: PointId,
    pub value: f64,
}

/// One cell of a one-dimensional partition.
///
/// `LeftUnbounded` is `(-inf, hi)`, `RightUnbounded` is `(lo, +inf)`; all
/// non-singleton kinds are open at their finite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub kind: IntervalKind,
    pub lo: Option<Endpoint>,
    pub hi: Option<Endpoint>,
}

impl Interval {
    pub fn whole_line() -> Self {
        Self {
            kind: IntervalKind::WholeLine,
            lo: None,
            hi: None,
        }
    }

    pub fn singleton(at: Endpoint) -> Self {
        Self {
            kind: IntervalKind::Singleton,
            lo: Some(at),
            hi: Some(at),
        }
    }

    pub fn left_unbounded(hi: Endpoint) -> Self {
        Self {
            kind: IntervalKind::LeftUnbounded,
            lo: None,
            hi: Some(hi),
        }
    }

    pub fn right_unbounded(lo: Endpoint) -> Self {
        Self {
            kind: IntervalKind::RightUnbounded,
            lo: Some(lo),
            hi: None,
        }
    }

    pub fn open_span(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        if lo.value < hi.value {
            Ok(Self {
                kind: IntervalKind::OpenSpan,
                lo: Some(lo),
                hi: Some(hi),
            })
        } else {
            Err(Error::InvalidPartition(format!(
                "open span needs lo < hi, got ({}, {})",
                lo.value, hi.value
            )))
        }
    }

    /// Supremum, `+inf` when unbounded above.
    pub fn sup(&self) -> f64 {
        self.hi.map_or(f64::INFINITY, |e| e.value)
    }

    /// Infimum, `-inf` when unbounded below.
    pub fn inf(&self) -> f64 {
        self.lo.map_or(f64::NEG_INFINITY, |e| e.value)
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.kind {
            IntervalKind::Singleton => x == self.inf(),
            _ => self.inf() < x && x < self.sup(),
        }
    }
}

/// The `2m + 1` cells induced by sorted breakpoints `b_1 < ... < b_m`:
/// `(-inf, b_1), [b_1], (b_1, b_2), ..., [b_m], (b_m, +inf)`.
///
/// Cell `2i` is the open gap below breakpoint `i` (0-based), cell `2i + 1`
/// is the singleton at breakpoint `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    dim: usize,
    breakpoints: Vec<Endpoint>,
}

impl Partition {
    /// Reads the breakpoint values of `ids` in coordinate `dim`; they must be
    /// strictly increasing.
    pub fn from_sorted(inst: &Instance, dim: usize, ids: &[PointId]) -> Result<Self> {
        inst.check_dim(dim)?;
        let mut breakpoints = Vec::with_capacity(ids.len());
        for &id in ids {
            inst.check_id(id)?;
            breakpoints.push(Endpoint {
                id,
                value: inst.coord(id, dim),
            });
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0].value >= w[1].value) {
            return Err(Error::InvalidPartition(format!(
                "breakpoints not strictly increasing at points {} and {}",
                w[0].id, w[1].id
            )));
        }
        Ok(Self { dim, breakpoints })
    }

    /// Same layout without the ordering check, for breakpoint lists produced
    /// by noisy sorting that may be slightly out of order.
    pub(crate) fn from_sorted_unchecked(inst: &Instance, dim: usize, ids: &[PointId]) -> Self {
        let breakpoints = ids
            .iter()
            .map(|&id| Endpoint {
                id,
                value: inst.coord(id, dim),
            })
            .collect();
        Self { dim, breakpoints }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn breakpoints(&self) -> &[Endpoint] {
        &self.breakpoints
    }

    /// Number of cells, `2m + 1`.
    pub fn cell_count(&self) -> usize {
        2 * self.breakpoints.len() + 1
    }

    pub fn cell(&self, index: usize) -> Interval {
        assert!(index < self.cell_count(), "cell index {index} out of range");
        let m = self.breakpoints.len();
        if index % 2 == 1 {
            return Interval::singleton(self.breakpoints[index / 2]);
        }
        let gap = index / 2;
        match (
            gap.checked_sub(1).map(|i| self.breakpoints[i]),
            self.breakpoints.get(gap).copied(),
        ) {
            (None, None) => Interval::whole_line(),
            (None, Some(hi)) => Interval::left_unbounded(hi),
            (Some(lo), None) => Interval::right_unbounded(lo),
            (Some(lo), Some(hi)) => {
                debug_assert!(gap < m + 1);
                Interval {
                    kind: IntervalKind::OpenSpan,
                    lo: Some(lo),
                    hi: Some(hi),
                }
            }
        }
    }

    /// Exact cell index of a coordinate value.
    pub fn locate(&self, x: f64) -> usize {
        let below = self.breakpoints.partition_point(|b| b.value < x);
        match self.breakpoints.get(below) {
            Some(b) if b.value == x => 2 * below + 1,
            _ => 2 * below,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emptiness {
    Empty,
    NonEmpty,
    Unknown,
}

/// A product of `d` cells with the points assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Bucket {
    pub cells: Vec<Interval>,
    pub assigned: Vec<PointId>,
    pub emptiness: Emptiness,
}

impl Bucket {
    pub fn new(cells: Vec<Interval>) -> Self {
        Self {
            cells,
            assigned: Vec::new(),
            emptiness: Emptiness::Unknown,
        }
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn contains_exact(&self, coords: &[f64]) -> bool {
        self.cells
            .iter()
            .zip(coords)
            .all(|(cell, &x)| cell.contains(x))
    }
}

/// `dominator` dominates `dominated` when `sup(I_i) <= inf(I'_i)` in every
/// dimension and the cell sequences differ. Cells must come from the same
/// per-dimension partitions; then every point of `dominator` strictly
/// dominates every point of `dominated`.
pub fn bucket_dominates(dominator: &Bucket, dominated: &Bucket) -> bool {
    assert_eq!(
        dominator.dim(),
        dominated.dim(),
        "bucket dimension mismatch"
    );
    let ordered = dominated
        .cells
        .iter()
        .zip(&dominator.cells)
        .all(|(lower, upper)| lower.sup() <= upper.inf());
    ordered && dominator.cells != dominated.cells
}

/// Same relation on cell-index keys of a shared partition grid.
pub(crate) fn cell_key_dominates(dominator: &[u32], dominated: &[u32]) -> bool {
    dominator != dominated
        && dominator
            .iter()
            .zip(dominated)
            .all(|(&up, &low)| low < up || (low == up && low % 2 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(id: PointId, c: &[f64]) -> Point {
        Point::new(id, c.to_vec())
    }

    fn ep(id: PointId, value: f64) -> Endpoint {
        Endpoint { id, value }
    }

    #[test]
    fn weak_and_strict_dominance() {
        assert!(dominates_exact(&[3.0, 3.0], &[1.0, 2.0]));
        assert!(!dominates_exact(&[1.0, 3.0], &[2.0, 2.0]));
        assert!(dominates_exact(&[2.0, 2.0], &[2.0, 2.0]));

        assert!(strictly_dominates_exact(&[3.0, 3.0], &[1.0, 2.0]));
        assert!(!strictly_dominates_exact(&[2.0, 2.0], &[2.0, 2.0]));
        assert!(!strictly_dominates_exact(&[2.0, 1.0], &[1.0, 2.0]));
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dominance_rejects_mismatched_dims() {
        dominates_exact(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn lex_order_examples() {
        assert!(lex_greater_exact(&pt(0, &[3.0, 1.0]), &pt(1, &[2.0, 9.0])));
        assert!(!lex_greater_exact(&pt(0, &[2.0, 1.0]), &pt(1, &[2.0, 9.0])));
        assert!(lex_greater_exact(&pt(7, &[2.0, 2.0]), &pt(3, &[2.0, 2.0])));
    }

    #[test]
    #[should_panic(expected = "itself")]
    fn lex_rejects_same_id() {
        lex_greater_exact(&pt(1, &[1.0]), &pt(1, &[2.0]));
    }

    #[test]
    fn staircase_skyline() {
        let inst = Instance::from_rows(vec![
            vec![1.0, 3.0],
            vec![2.0, 2.0],
            vec![3.0, 1.0],
            vec![0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(skyline_exact(&inst), vec![0, 1, 2]);
        let single = Instance::from_rows(vec![vec![5.0, 5.0]]).unwrap();
        assert_eq!(skyline_exact(&single), vec![0]);
    }

    #[test]
    fn duplicates_both_survive_exact_skyline() {
        let inst =
            Instance::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(skyline_exact(&inst), vec![0, 1]);
        assert!(!inst.is_general_position());
    }

    #[test]
    fn figure_style_staircase() {
        // k maxima on an anti-diagonal, every other point strictly below all of them.
        let k = 6;
        let mut rows: Vec<Vec<f64>> = (0..k)
            .map(|j| vec![(10 + j) as f64, (10 + k - 1 - j) as f64])
            .collect();
        for i in 0..20 {
            rows.push(vec![(i % 9) as f64, (i % 7) as f64]);
        }
        let inst = Instance::from_rows(rows).unwrap();
        assert_eq!(skyline_exact(&inst), (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn instance_rejects_bad_input() {
        assert!(Instance::from_rows(vec![]).is_err());
        assert!(Instance::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Instance::from_points(vec![pt(0, &[1.0]), pt(2, &[2.0])]).is_err());
    }

    #[test]
    fn json_layout_is_canonical() {
        let inst = Instance::from_rows(vec![vec![1.0, 2.0], vec![3.0, 0.0]]).unwrap();
        let text = inst.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let at = |key: &str| text.find(&format!("\"{key}\"")).unwrap();
        assert!(at("n") < at("d") && at("d") < at("points") && at("points") < at("meta"));
        assert_eq!(value["points"][1]["coords"][0], 3.0);
        assert_eq!(Instance::from_json(&text).unwrap(), inst);
        assert!(
            Instance::from_json(r#"{"n":2,"d":1,"points":[{"id":0,"coords":[1]}],"meta":{}}"#)
                .is_err()
        );
    }

    #[test]
    fn partition_layout() {
        let inst = Instance::from_rows(vec![vec![2.0], vec![4.0], vec![8.0]]).unwrap();
        let part = Partition::from_sorted(&inst, 0, &[0, 1, 2]).unwrap();
        assert_eq!(part.cell_count(), 7);
        let kinds: Vec<IntervalKind> = (0..7).map(|i| part.cell(i).kind).collect();
        use IntervalKind::*;
        assert_eq!(
            kinds,
            [
                LeftUnbounded,
                Singleton,
                OpenSpan,
                Singleton,
                OpenSpan,
                Singleton,
                RightUnbounded
            ]
        );
        assert_eq!(part.locate(5.0), 4);
        assert_eq!(part.locate(4.0), 3);
        assert_eq!(part.locate(-1.0), 0);
        assert_eq!(part.locate(9.0), 6);
        for x in [-1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 9.0] {
            let hits: Vec<usize> = (0..7).filter(|&i| part.cell(i).contains(x)).collect();
            assert_eq!(hits, vec![part.locate(x)], "x = {x}");
        }
        assert!(Partition::from_sorted(&inst, 0, &[1, 0]).is_err());
        let empty = Partition::from_sorted(&inst, 0, &[]).unwrap();
        assert_eq!(empty.cell(0).kind, WholeLine);
    }

    #[test]
    fn bucket_domination_examples() {
        let open = Interval::open_span(ep(0, 2.0), ep(1, 4.0)).unwrap();
        let four = Interval::singleton(ep(1, 4.0));
        let low = Bucket::new(vec![open, open]);
        let high = Bucket::new(vec![four, four]);
        assert!(bucket_dominates(&high, &low));
        assert!(!bucket_dominates(&low, &low));

        let below_two = Interval::left_unbounded(ep(0, 2.0));
        let above_four = Interval::right_unbounded(ep(1, 4.0));
        let b = Bucket::new(vec![below_two, above_four]);
        let b_prime = Bucket::new(vec![above_four, below_two]);
        assert!(!bucket_dominates(&b_prime, &b));
    }

    #[test]
    fn open_span_invariant() {
        assert!(Interval::open_span(ep(0, 3.0), ep(1, 3.0)).is_err());
    }

    #[test]
    fn key_domination_matches_interval_domination() {
        let inst = Instance::from_rows(vec![vec![1.0], vec![3.0], vec![5.0]]).unwrap();
        let part = Partition::from_sorted(&inst, 0, &[0, 1, 2]).unwrap();
        let cells = part.cell_count() as u32;
        for a0 in 0..cells {
            for a1 in 0..cells {
                for b0 in 0..cells {
                    for b1 in 0..cells {
                        let ba = Bucket::new(vec![part.cell(a0 as usize), part.cell(a1 as usize)]);
                        let bb = Bucket::new(vec![part.cell(b0 as usize), part.cell(b1 as usize)]);
                        assert_eq!(
                            cell_key_dominates(&[a0, a1], &[b0, b1]),
                            bucket_dominates(&ba, &bb)
                        );
                    }
                }
            }
        }
    }
}
