//! Output-sensitive skyline computation when every coordinate comparison
//! may lie.
//!
//! The [`oracle::NoisyOracle`] answers `p[i] < q[i]?` incorrectly with a
//! fixed probability and counts every query. On top of it sit the boosted
//! primitives (search, sort), the noisy dominance tests, and the skyline
//! algorithms. [`geom`] holds the exact ground-truth computations and
//! [`instances`] the seeded generators.
//!
//! ```
//! use noisy_skyline::{gen_fixed_skyline, guess_skyline_high_dim, skyline_exact, NoisyOracle};
//!
//! let inst = gen_fixed_skyline(64, 3, 4, 7).unwrap();
//! let mut oracle = NoisyOracle::new(&inst, 1.0 / 3.0, 11).unwrap();
//! let sky = guess_skyline_high_dim(&inst.ids(), 0.1, &mut oracle).unwrap();
//! assert_eq!(sky.len(), skyline_exact(&inst).len());
//! println!("{} queries", oracle.snapshot_queries());
//! ```

pub mod dominance;
pub mod error;
pub mod geom;
pub mod instances;
pub mod oracle;
pub mod primitives;
pub mod skyline;

pub use dominance::{
    dominates_noisy, in_bucket, is_empty, lex_noisy, max_lex, max_lex_iteration_cap,
    max_lex_traced, set_dominates, MaxLexOutcome,
};
pub use error::{Error, Result};
pub use geom::{
    bucket_dominates, dominates_exact, lex_greater_exact, lex_max_dominator_exact, skyline_exact,
    skyline_exact_of, strictly_dominates_exact, Bucket, Emptiness, Endpoint, Instance,
    InstanceMeta, Interval, IntervalKind, Partition, Point, PointId,
};
pub use instances::{
    decode_skyline_to_answer, gen_fixed_skyline, gen_null_vectors, gen_uniform, reduce_to_skyline,
    NullVectorsInput, ReductionLayout,
};
pub use oracle::{derive_seed, mix64, NoisyOracle, Phase, DEFAULT_FLIP_PROB};
pub use primitives::{
    boost_prob, dedupe_sorted, noisy_search, noisy_sort, BoostThresholds, SearchParams,
};
pub use skyline::{
    guess_skyline_high_dim, guess_skyline_high_dim_traced, guess_skyline_low_dim,
    guess_skyline_low_dim_traced, sky_gm, skyline_high_dim, skyline_low_dim,
    skyline_low_dim_traced, AlgoConfig, GuessReport, GuessRound, LowDimPath, LowDimReport,
    TestModeConstants,
};
