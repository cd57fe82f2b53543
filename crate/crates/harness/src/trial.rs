//! One algorithm run on one seeded instance, with its query accounting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use noisy_skyline::{
    derive_seed, gen_fixed_skyline, gen_uniform, guess_skyline_high_dim, guess_skyline_low_dim,
    sky_gm, skyline_exact, skyline_high_dim, skyline_low_dim, AlgoConfig, Instance, NoisyOracle,
    Phase, PointId,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SkyGm,
    /// Run with `k` set to the true skyline size.
    HighDim,
    GuessHighDim,
    LowDim,
    LowDimTest,
    GuessLowDim,
    GuessLowDimTest,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::SkyGm,
        Algorithm::HighDim,
        Algorithm::GuessHighDim,
        Algorithm::LowDim,
        Algorithm::LowDimTest,
        Algorithm::GuessLowDim,
        Algorithm::GuessLowDimTest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SkyGm => "sky-gm",
            Algorithm::HighDim => "high-dim",
            Algorithm::GuessHighDim => "guess-high-dim",
            Algorithm::LowDim => "low-dim",
            Algorithm::LowDimTest => "low-dim-test",
            Algorithm::GuessLowDim => "guess-low-dim",
            Algorithm::GuessLowDimTest => "guess-low-dim-test",
        }
    }

    fn config(self, sample_seed: u64) -> AlgoConfig {
        let base = match self {
            Algorithm::LowDimTest | Algorithm::GuessLowDimTest => AlgoConfig::test_mode(),
            _ => AlgoConfig::default(),
        };
        base.with_sample_seed(sample_seed)
    }

    /// Runs the algorithm on all points of the oracle's instance.
    pub fn run(
        self,
        true_k: usize,
        delta: f64,
        sample_seed: u64,
        oracle: &mut NoisyOracle<'_>,
    ) -> noisy_skyline::Result<Vec<PointId>> {
        let ids = oracle.instance().ids();
        let k = true_k as u64;
        let cfg = self.config(sample_seed);
        match self {
            Algorithm::SkyGm => sky_gm(&ids, delta, oracle),
            Algorithm::HighDim => skyline_high_dim(k, &ids, delta, oracle),
            Algorithm::GuessHighDim => guess_skyline_high_dim(&ids, delta, oracle),
            Algorithm::LowDim | Algorithm::LowDimTest => {
                skyline_low_dim(k, &ids, delta, &cfg, oracle)
            }
            Algorithm::GuessLowDim | Algorithm::GuessLowDimTest => {
                guess_skyline_low_dim(&ids, delta, &cfg, oracle)
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    FixedSkyline,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::FixedSkyline => "fixed-skyline",
        }
    }

    /// `k` is ignored by the uniform family.
    pub fn generate(
        self,
        n: usize,
        d: usize,
        k: usize,
        seed: u64,
    ) -> noisy_skyline::Result<Instance> {
        match self {
            Family::Uniform => gen_uniform(n, d, seed),
            Family::FixedSkyline => gen_fixed_skyline(n, d, k, seed),
        }
    }
}

impl FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        [Family::Uniform, Family::FixedSkyline]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown instance family `{s}`")))
    }
}

/// One point of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub family: Family,
    pub n: usize,
    pub d: usize,
    /// Planted skyline size; `None` for the uniform family.
    pub k: Option<usize>,
    pub delta: f64,
    pub flip_prob: f64,
}

/// Per-trial seeds, all derived from `(master_seed, trial)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub instance: u64,
    pub oracle: u64,
    pub sampling: u64,
}

impl TrialSeeds {
    pub fn derive(master_seed: u64, trial: u64) -> Self {
        let base = derive_seed(master_seed, trial);
        Self {
            instance: derive_seed(base, 1),
            oracle: derive_seed(base, 2),
            sampling: derive_seed(base, 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub master_seed: u64,
    pub trial: u64,
    pub n: usize,
    pub d: usize,
    pub true_k: usize,
    pub delta: f64,
    pub flip_prob: f64,
    pub queries: u64,
    pub queries_per_phase: BTreeMap<String, u64>,
    pub correct: bool,
    pub wall_ms: f64,
    /// Set when the run ended in a contract violation instead of an output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn phase(&self, phase: Phase) -> u64 {
        self.queries_per_phase
            .get(phase.name())
            .copied()
            .unwrap_or(0)
    }
}

/// Ground truth of an instance: the recorded skyline, or brute force.
pub fn ground_truth(inst: &Instance) -> Vec<PointId> {
    inst.meta()
        .skyline_ids
        .clone()
        .unwrap_or_else(|| skyline_exact(inst))
}

/// Runs `algorithm` on a given instance with a fresh oracle.
pub fn run_on_instance(
    inst: &Instance,
    algorithm: Algorithm,
    delta: f64,
    flip_prob: f64,
    master_seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    let seeds = TrialSeeds::derive(master_seed, trial);
    let truth = ground_truth(inst);
    let mut oracle = NoisyOracle::new(inst, flip_prob, seeds.oracle)?;
    let start = Instant::now();
    let outcome = algorithm.run(truth.len(), delta, seeds.sampling, &mut oracle);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (correct, error) = match outcome {
        Ok(out) => (out == truth, None),
        Err(e) => (false, Some(e.to_string())),
    };
    Ok(TrialRecord {
        algorithm,
        master_seed,
        trial,
        n: inst.len(),
        d: inst.dim(),
        true_k: truth.len(),
        delta,
        flip_prob,
        queries: oracle.snapshot_queries(),
        queries_per_phase: oracle
            .phase_breakdown()
            .map(|(p, q)| (p.name().to_owned(), q))
            .collect(),
        correct,
        wall_ms,
        error,
    })
}

/// Generates the cell's instance from the trial's derived seed and runs it.
/// Generation failures are returned as errors; algorithm failures are
/// recorded in the trial.
pub fn run_trial(cell: &Cell, master_seed: u64, trial: u64) -> Result<TrialRecord> {
    let seeds = TrialSeeds::derive(master_seed, trial);
    let inst = cell
        .family
        .generate(cell.n, cell.d, cell.k.unwrap_or(1), seeds.instance)?;
    run_on_instance(
        &inst,
        cell.algorithm,
        cell.delta,
        cell.flip_prob,
        master_seed,
        trial,
    )
}
