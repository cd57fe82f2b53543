//! Grid sweeps: one CSV row per trial plus a per-cell summary.

use std::fs;
use std::path::{Path, PathBuf};

use noisy_skyline::Phase;
use serde::{Deserialize, Serialize};

use crate::analytic::clopper_pearson;
use crate::error::{HarnessError, Result};
use crate::trial::{run_trial, Algorithm, Cell, Family, TrialRecord};

fn default_flip() -> f64 {
    noisy_skyline::DEFAULT_FLIP_PROB
}

/// A sweep as read from a flat TOML file:
///
/// ```toml
/// algorithm = "guess-high-dim"
/// family = "fixed-skyline"
/// n = [128, 256, 512]
/// d = [3]
/// k = [4]
/// delta = 0.1
/// trials = 50
/// master_seed = 7
/// output = "scaling.csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub algorithm: Algorithm,
    pub family: Family,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    /// Ignored by the uniform family.
    #[serde(default)]
    pub k: Vec<usize>,
    pub delta: f64,
    #[serde(default = "default_flip")]
    pub flip_prob: f64,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    pub output: PathBuf,
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Grid cells in `n`, then `d`, then `k` order.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let ks: Vec<Option<usize>> = match self.family {
            Family::Uniform => vec![None],
            Family::FixedSkyline if self.k.is_empty() => {
                return Err(HarnessError::Config(
                    "the fixed-skyline family needs a `k` list".into(),
                ))
            }
            Family::FixedSkyline => self.k.iter().copied().map(Some).collect(),
        };
        let mut cells = Vec::new();
        for &n in &self.n {
            for &d in &self.d {
                for &k in &ks {
                    cells.push(Cell {
                        algorithm: self.algorithm,
                        family: self.family,
                        n,
                        d,
                        k,
                        delta: self.delta,
                        flip_prob: self.flip_prob,
                    });
                }
            }
        }
        Ok(cells)
    }

    /// `foo.csv` -> `foo.summary.csv`.
    pub fn summary_path(&self) -> PathBuf {
        let stem = self
            .output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.output.with_file_name(format!("{stem}.summary.csv"))
    }
}

/// Flat CSV layout of a [`TrialRecord`]; column order is fixed.
#[derive(Debug, Serialize)]
struct TrialRow<'a> {
    algorithm: &'a str,
    master_seed: u64,
    trial: u64,
    n: usize,
    d: usize,
    true_k: usize,
    delta: f64,
    flip_prob: f64,
    queries: u64,
    correct: bool,
    wall_ms: f64,
    q_unattributed: u64,
    q_sort: u64,
    q_bucketing: u64,
    q_elimination: u64,
    q_domination: u64,
    q_maxlex: u64,
    error: &'a str,
}

impl<'a> From<&'a TrialRecord> for TrialRow<'a> {
    fn from(r: &'a TrialRecord) -> Self {
        Self {
            algorithm: r.algorithm.name(),
            master_seed: r.master_seed,
            trial: r.trial,
            n: r.n,
            d: r.d,
            true_k: r.true_k,
            delta: r.delta,
            flip_prob: r.flip_prob,
            queries: r.queries,
            correct: r.correct,
            wall_ms: r.wall_ms,
            q_unattributed: r.phase(Phase::Unattributed),
            q_sort: r.phase(Phase::Sort),
            q_bucketing: r.phase(Phase::Bucketing),
            q_elimination: r.phase(Phase::Elimination),
            q_domination: r.phase(Phase::Domination),
            q_maxlex: r.phase(Phase::MaxLex),
            error: r.error.as_deref().unwrap_or(""),
        }
    }
}

pub const TRIAL_COLUMNS: [&str; 18] = [
    "algorithm",
    "master_seed",
    "trial",
    "n",
    "d",
    "true_k",
    "delta",
    "flip_prob",
    "queries",
    "correct",
    "wall_ms",
    "q_unattributed",
    "q_sort",
    "q_bucketing",
    "q_elimination",
    "q_domination",
    "q_maxlex",
    "error",
];

/// Per-cell aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub family: Family,
    pub n: usize,
    pub d: usize,
    /// Empty for the uniform family.
    pub k: Option<usize>,
    pub delta: f64,
    pub flip_prob: f64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_queries: f64,
    pub sd_queries: f64,
}

impl CellSummary {
    pub fn from_records(cell: &Cell, records: &[TrialRecord]) -> Self {
        let trials = records.len() as u64;
        let successes = records.iter().filter(|r| r.correct).count() as u64;
        let (ci_low, ci_high) = clopper_pearson(successes, trials, 0.05);
        let queries: Vec<f64> = records.iter().map(|r| r.queries as f64).collect();
        let mean = if queries.is_empty() {
            0.0
        } else {
            queries.iter().sum::<f64>() / queries.len() as f64
        };
        let sd = if queries.len() < 2 {
            0.0
        } else {
            (queries.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (queries.len() - 1) as f64)
                .sqrt()
        };
        Self {
            algorithm: cell.algorithm,
            family: cell.family,
            n: cell.n,
            d: cell.d,
            k: cell.k,
            delta: cell.delta,
            flip_prob: cell.flip_prob,
            trials,
            successes,
            success_rate: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_low,
            ci_high,
            mean_queries: mean,
            sd_queries: sd,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub trials_path: PathBuf,
    pub summary_path: PathBuf,
    /// Sorted by cell, then trial index.
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<CellSummary>,
}

/// Runs every cell for `spec.trials` trials and writes both CSVs.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    let cells = spec.cells()?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for cell in &cells {
        let rows = (0..spec.trials)
            .map(|t| run_trial(cell, spec.master_seed, t))
            .collect::<Result<Vec<_>>>()?;
        summaries.push(CellSummary::from_records(cell, &rows));
        records.extend(rows);
    }

    let trials_path = spec.output.clone();
    let summary_path = spec.summary_path();
    if let Some(dir) = trials_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    write_trials(&trials_path, &records)?;
    write_summary(&summary_path, &summaries)?;
    Ok(SweepOutput {
        trials_path,
        summary_path,
        records,
        summaries,
    })
}

fn write_trials(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    // Written by hand so an empty sweep still gets its header.
    w.write_record(TRIAL_COLUMNS)
        .map_err(|e| HarnessError::csv(path, e))?;
    for r in records {
        w.serialize(TrialRow::from(r))
            .map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "algorithm",
    "family",
    "n",
    "d",
    "k",
    "delta",
    "flip_prob",
    "trials",
    "successes",
    "success_rate",
    "ci_low",
    "ci_high",
    "mean_queries",
    "sd_queries",
];

fn write_summary(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    w.write_record(SUMMARY_COLUMNS)
        .map_err(|e| HarnessError::csv(path, e))?;
    for s in summaries {
        w.serialize(s).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}
