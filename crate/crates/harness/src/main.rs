use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use noisy_skyline::{
    gen_null_vectors, reduce_to_skyline, skyline_exact, Instance, DEFAULT_FLIP_PROB,
};
use skyline_harness::{run_on_instance, run_sweep, Algorithm, Family, SweepSpec};

#[derive(Parser)]
#[command(name = "skyline", version, about = "Noisy skyline experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Uniform,
    FixedSkyline,
    /// Hard instance built from a random null-vectors input.
    NullReduction,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as JSON.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: usize,
        /// Skyline size (fixed-skyline) or number of vectors (null-reduction).
        #[arg(long)]
        k: Option<usize>,
        /// Vector length for null-reduction.
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on an instance file and print the trial record.
    Run {
        instance: PathBuf,
        #[arg(long)]
        algorithm: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_FLIP_PROB)]
        flip_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Print the brute-force skyline ids of an instance file.
    Verify { instance: PathBuf },
    /// Run a sweep described by a TOML config file.
    Sweep { config: PathBuf },
}

fn read_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Gen {
            family,
            n,
            d,
            k,
            ell,
            seed,
            out,
        } => {
            let inst = match family {
                GenFamily::Uniform => {
                    Family::Uniform.generate(n.context("--n is required")?, d, 1, seed)?
                }
                GenFamily::FixedSkyline => Family::FixedSkyline.generate(
                    n.context("--n is required")?,
                    d,
                    k.context("--k is required")?,
                    seed,
                )?,
                GenFamily::NullReduction => {
                    let input = gen_null_vectors(
                        k.context("--k is required")?,
                        ell.context("--ell is required")?,
                        seed,
                    )?;
                    reduce_to_skyline(&input, d, seed)?
                }
            };
            let json = inst.to_json()?;
            match out {
                Some(path) => {
                    fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?
                }
                None => println!("{json}"),
            }
        }
        Command::Run {
            instance,
            algorithm,
            delta,
            flip_prob,
            seed,
            trial,
        } => {
            let inst = read_instance(&instance)?;
            let algorithm: Algorithm = algorithm.parse()?;
            let record = run_on_instance(&inst, algorithm, delta, flip_prob, seed, trial)?;
            println!("{}", serde_json::to_string_pretty(&record)?);
            if let Some(err) = record.error {
                bail!("{algorithm} failed: {err}");
            }
        }
        Command::Verify { instance } => {
            let inst = read_instance(&instance)?;
            let sky = skyline_exact(&inst);
            println!("{}", serde_json::to_string(&sky)?);
            if let Some(recorded) = &inst.meta().skyline_ids {
                if recorded != &sky {
                    bail!("recorded skyline {recorded:?} differs from the brute-force skyline");
                }
            }
        }
        Command::Sweep { config } => {
            let spec = SweepSpec::load(&config)?;
            let out = run_sweep(&spec)?;
            eprintln!(
                "{} trials -> {}, {} cells -> {}",
                out.records.len(),
                out.trials_path.display(),
                out.summaries.len(),
                out.summary_path.display()
            );
        }
    }
    Ok(())
}
