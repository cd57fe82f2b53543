//! Experiment harness for the noisy skyline library: seeded trials with
//! query accounting, grid sweeps to CSV, and closed-form oracles used by
//! the statistical tests.

pub mod analytic;
pub mod error;
pub mod sweep;
pub mod trial;

pub use analytic::{binomial_sigma, clopper_pearson, gambler_ruin, RuinOutcome};
pub use error::{HarnessError, Result};
pub use sweep::{run_sweep, CellSummary, SweepOutput, SweepSpec, SUMMARY_COLUMNS, TRIAL_COLUMNS};
pub use trial::{
    ground_truth, run_on_instance, run_trial, Algorithm, Cell, Family, TrialRecord, TrialSeeds,
};
