//! Noise-reduction building blocks: boosting, noisy search, noisy sort and
//! duplicate removal.

pub mod boost;
pub mod search;
pub mod sort;

pub use boost::{boost_prob, boost_with, BoostOutcome, BoostThresholds};
pub use search::{noisy_search, noisy_search_with, SearchParams};
pub use sort::{dedupe_sorted, noisy_sort, noisy_sort_with};
