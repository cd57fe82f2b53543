use std::collections::BTreeSet;

use noisy_skyline::{
    bucket_dominates, decode_skyline_to_answer, gen_fixed_skyline, gen_null_vectors, gen_uniform,
    guess_skyline_high_dim, guess_skyline_low_dim, lex_greater_exact, noisy_search, noisy_sort,
    reduce_to_skyline, sky_gm, skyline_exact, skyline_high_dim, skyline_low_dim,
    strictly_dominates_exact, AlgoConfig, Bucket, Instance, Interval, IntervalKind, NoisyOracle,
    Partition, Point, PointId,
};
use proptest::prelude::*;

fn rows(max_n: usize, max_d: usize, span: u8) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_d).prop_flat_map(move |d| {
        prop::collection::vec(
            prop::collection::vec((0..span).prop_map(f64::from), d),
            1..=max_n,
        )
    })
}

fn sky_coords(inst: &Instance) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = skyline_exact(inst)
        .into_iter()
        .map(|id| inst.coords(id).iter().map(|&x| x as i64).collect())
        .collect();
    out.sort();
    out
}

/// A value strictly inside `cell`, chosen by `u` in (0, 1).
fn inside(cell: &Interval, u: f64) -> f64 {
    match cell.kind {
        IntervalKind::Singleton => cell.lo.unwrap().value,
        IntervalKind::OpenSpan => {
            let (lo, hi) = (cell.lo.unwrap().value, cell.hi.unwrap().value);
            lo + (hi - lo) * u
        }
        IntervalKind::LeftUnbounded => cell.hi.unwrap().value - 1.0 - 10.0 * u,
        IntervalKind::RightUnbounded => cell.lo.unwrap().value + 1.0 + 10.0 * u,
        IntervalKind::WholeLine => 10.0 * u,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skyline_ignores_point_order(rows in rows(24, 4, 6), seed in any::<u64>()) {
        let inst = Instance::from_rows(rows.clone()).unwrap();
        let mut shuffled = rows;
        // Deterministic shuffle driven by the seed.
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let other = Instance::from_rows(shuffled).unwrap();
        prop_assert_eq!(sky_coords(&inst), sky_coords(&other));
    }

    #[test]
    fn every_non_skyline_point_has_a_skyline_witness(rows in rows(64, 4, 8)) {
        let inst = Instance::from_rows(rows).unwrap();
        let sky = skyline_exact(&inst);
        let members: BTreeSet<PointId> = sky.iter().copied().collect();
        for p in inst.ids() {
            if members.contains(&p) {
                prop_assert!(inst.ids().iter().all(|&q| !strictly_dominates_exact(inst.coords(q), inst.coords(p))));
            } else {
                prop_assert!(sky.iter().any(|&q| strictly_dominates_exact(inst.coords(q), inst.coords(p))));
            }
        }
    }

    #[test]
    fn lex_order_is_strict_and_total(rows in rows(6, 3, 3)) {
        let pts: Vec<Point> = rows.into_iter().enumerate().map(|(i, c)| Point::new(i, c)).collect();
        for a in &pts {
            for b in &pts {
                if a.id == b.id {
                    continue;
                }
                prop_assert!(lex_greater_exact(a, b) != lex_greater_exact(b, a));
                for c in &pts {
                    if c.id != a.id && c.id != b.id && lex_greater_exact(a, b) && lex_greater_exact(b, c) {
                        prop_assert!(lex_greater_exact(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn dominating_buckets_dominate_their_points(
        d in 1usize..4,
        m in 0usize..5,
        keys in prop::collection::vec(0usize..11, 8),
        us in prop::collection::vec(0.01f64..0.99, 8),
    ) {
        // Breakpoints 0, 3, 6, ... in every dimension.
        let rows: Vec<Vec<f64>> = (0..m).map(|i| vec![3.0 * i as f64; d]).collect();
        let grids: Vec<Partition> = if m == 0 {
            Vec::new()
        } else {
            let inst = Instance::from_rows(rows).unwrap();
            (0..d).map(|i| Partition::from_sorted(&inst, i, &(0..m).collect::<Vec<_>>()).unwrap()).collect()
        };
        let cells = |offset: usize| -> Vec<Interval> {
            (0..d)
                .map(|i| match grids.get(i) {
                    Some(g) => g.cell(keys[offset + i] % g.cell_count()),
                    None => Interval::whole_line(),
                })
                .collect()
        };
        let (hi, lo) = (Bucket::new(cells(0)), Bucket::new(cells(4)));
        if bucket_dominates(&hi, &lo) {
            let p: Vec<f64> = hi.cells.iter().zip(&us[..4]).map(|(c, &u)| inside(c, u)).collect();
            let q: Vec<f64> = lo.cells.iter().zip(&us[4..]).map(|(c, &u)| inside(c, u)).collect();
            prop_assert!(hi.contains_exact(&p) && lo.contains_exact(&q));
            prop_assert!(strictly_dominates_exact(&p, &q));
        }
    }

    #[test]
    fn noiseless_compare_is_exact(rows in rows(12, 3, 4), picks in prop::collection::vec((0usize..12, 0usize..12, 0usize..3), 20)) {
        let inst = Instance::from_rows(rows).unwrap();
        let mut oracle = NoisyOracle::new(&inst, 0.0, 5).unwrap();
        for (p, q, i) in picks {
            let (p, q, i) = (p % inst.len(), q % inst.len(), i % inst.dim());
            prop_assert_eq!(oracle.compare(p, q, i), inst.coord(p, i) < inst.coord(q, i));
        }
        prop_assert_eq!(oracle.snapshot_queries(), 20);
    }

    #[test]
    fn transcript_is_reproducible(seed in any::<u64>()) {
        let inst = gen_uniform(8, 2, 1).unwrap();
        let run = || {
            let mut oracle = NoisyOracle::new(&inst, 1.0 / 3.0, seed).unwrap();
            (0..50).map(|t| oracle.compare(t % 8, (t * 3 + 1) % 8, t % 2)).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn noiseless_search_finds_the_exact_cell(n in 2usize..40, m in 0usize..20, seed in any::<u64>(), t in any::<usize>()) {
        let inst = gen_uniform(n, 1, seed).unwrap();
        let mut by_value = inst.ids();
        by_value.sort_by(|&a, &b| inst.coord(a, 0).total_cmp(&inst.coord(b, 0)));
        // Every other point, up to m of them, as breakpoints.
        let bps: Vec<PointId> = by_value.iter().copied().step_by(2).take(m).collect();
        let target = t % n;
        let mut oracle = NoisyOracle::noiseless(&inst);
        let got = noisy_search(target, 0, &bps, 0.1, &mut oracle).unwrap();
        let want = if bps.is_empty() {
            Interval::whole_line()
        } else {
            let grid = Partition::from_sorted(&inst, 0, &bps).unwrap();
            grid.cell(grid.locate(inst.coord(target, 0)))
        };
        prop_assert_eq!(got, want);
    }

    #[test]
    fn noiseless_sort_orders_by_value(n in 1usize..50, seed in any::<u64>()) {
        let inst = gen_uniform(n, 2, seed).unwrap();
        let mut oracle = NoisyOracle::noiseless(&inst);
        let got = noisy_sort(&inst.ids(), 1, 0.1, &mut oracle).unwrap();
        let mut want = inst.ids();
        want.sort_by(|&a, &b| inst.coord(a, 1).total_cmp(&inst.coord(b, 1)));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn fixed_skyline_has_exactly_k_points(n in 1usize..80, d in 2usize..5, k in 1usize..80, seed in any::<u64>()) {
        let k = k.min(n);
        let inst = gen_fixed_skyline(n, d, k, seed).unwrap();
        let sky = skyline_exact(&inst);
        prop_assert_eq!(sky.len(), k);
        prop_assert_eq!(Some(sky), inst.meta().skyline_ids.clone());
        prop_assert!(inst.is_general_position());
    }

    #[test]
    fn reduction_blocks_are_incomparable_and_decode(blocks in 1usize..4, d in 3usize..6, ell in 1usize..12, seed in any::<u64>()) {
        let k = blocks * (d - 2);
        let input = gen_null_vectors(k, ell, seed).unwrap();
        let inst = reduce_to_skyline(&input, d, seed ^ 1).unwrap();
        let layout = inst.meta().reduction.clone().unwrap();
        let per_block = ell + d - 2;
        for p in inst.ids() {
            for q in inst.ids() {
                if p / per_block != q / per_block {
                    prop_assert!(!strictly_dominates_exact(inst.coords(p), inst.coords(q)));
                }
            }
        }
        if layout.collisions == 0 {
            let sky = skyline_exact(&inst);
            prop_assert_eq!(decode_skyline_to_answer(&sky, &layout), input.answer());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noiseless_algorithms_match_brute_force(n in 1usize..48, d in 1usize..4, seed in any::<u64>()) {
        let inst = gen_uniform(n, d, seed).unwrap();
        let truth = skyline_exact(&inst);
        let ids = inst.ids();
        let k = truth.len() as u64;
        let mut o = NoisyOracle::noiseless(&inst);
        prop_assert_eq!(&sky_gm(&ids, 0.1, &mut o).unwrap(), &truth);
        prop_assert_eq!(&skyline_high_dim(k, &ids, 0.1, &mut o).unwrap(), &truth);
        prop_assert_eq!(&guess_skyline_high_dim(&ids, 0.1, &mut o).unwrap(), &truth);
        let cfg = AlgoConfig::test_mode().with_sample_seed(seed);
        prop_assert_eq!(&skyline_low_dim(k, &ids, 0.1, &cfg, &mut o).unwrap(), &truth);
        prop_assert_eq!(&guess_skyline_low_dim(&ids, 0.1, &cfg, &mut o).unwrap(), &truth);
    }

    #[test]
    fn phase_counts_add_up(n in 2usize..32, d in 2usize..4, seed in any::<u64>()) {
        let inst = gen_uniform(n, d, seed).unwrap();
        let mut o = NoisyOracle::new(&inst, 1.0 / 3.0, seed).unwrap();
        let cfg = AlgoConfig::test_mode().with_sample_seed(seed);
        guess_skyline_low_dim(&inst.ids(), 0.1, &cfg, &mut o).unwrap();
        guess_skyline_high_dim(&inst.ids(), 0.1, &mut o).unwrap();
        let parts: u64 = o.phase_breakdown().map(|(_, q)| q).sum();
        prop_assert!(o.snapshot_queries() > 0);
        prop_assert_eq!(parts, o.snapshot_queries());
    }
}
