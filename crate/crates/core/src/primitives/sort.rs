use crate::error::{check_open, Result};
use crate::geom::PointId;
use crate::oracle::NoisyOracle;
use crate::primitives::boost::{boost_with, BoostThresholds};
use crate::primitives::search::{search_cell, SearchParams};

/// Insertion sort by repeated noisy search: item `j` is searched into the
/// current list with budget `delta / m`. Output is in non-decreasing order
/// of coordinate `dim` with probability at least `1 - delta`.
pub fn noisy_sort(
    items: &[PointId],
    dim: usize,
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    noisy_sort_with(items, dim, delta, &SearchParams::default(), oracle)
}

pub fn noisy_sort_with(
    items: &[PointId],
    dim: usize,
    delta: f64,
    params: &SearchParams,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let inst = oracle.instance();
    inst.check_dim(dim)?;
    for &id in items {
        inst.check_id(id)?;
    }
    let per_insert = delta / items.len().max(1) as f64;
    let mut sorted: Vec<PointId> = Vec::with_capacity(items.len());
    for &item in items {
        let cell = search_cell(item, dim, &sorted, per_insert, params, oracle);
        // Gap 2i goes before breakpoint i; singleton 2i+1 goes right after it.
        sorted.insert(cell.div_ceil(2), item);
    }
    Ok(sorted)
}

/// Drops every element whose coordinate equals the previously kept one.
///
/// Equality is decided from the two strict queries `a < b` and `b < a`,
/// each boosted separately with both error sides at `delta / (2m)`; the
/// pair is merged only when both come back false.
pub fn dedupe_sorted(
    sorted: &[PointId],
    dim: usize,
    delta: f64,
    oracle: &mut NoisyOracle<'_>,
) -> Result<Vec<PointId>> {
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let inst = oracle.instance();
    inst.check_dim(dim)?;
    for &id in sorted {
        inst.check_id(id)?;
    }
    let Some((&first, rest)) = sorted.split_first() else {
        return Ok(Vec::new());
    };
    let side = delta / (2 * sorted.len()) as f64;
    let boost = BoostThresholds::from_budgets(side, side);
    let mut kept = vec![first];
    for &b in rest {
        let a = *kept.last().expect("kept is never empty");
        let distinct = boost_with(boost, || oracle.compare(a, b, dim)).verdict
            || boost_with(boost, || oracle.compare(b, a, dim)).verdict;
        if distinct {
            kept.push(b);
        }
    }
    Ok(kept)
}
