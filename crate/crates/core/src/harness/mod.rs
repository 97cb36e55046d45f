//! Experiment driver: configuration, seeded multi-run execution, aggregation
//! and CSV convergence output.

mod cli;
mod config;
mod csv;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::aio::{run_aio, AioParams};
use crate::benchfn::{lookup, BenchmarkId, BenchmarkSpec};
use crate::error::{Error, Result};
use crate::pso::{run_pso, PsoParams};

pub use cli::{cli_main, run_cli};
pub use config::parse_config;
pub use csv::{format_g17, render_csv, write_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Pso,
    Aio,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Aio => "aio",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso),
            "aio" => Ok(Algorithm::Aio),
            _ => Err(Error::config(format!(
                "unknown algorithm `{s}` (expected one of: pso, aio)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub benchmark: BenchmarkId,
    pub dims: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub pso_params: PsoParams,
    /// Ignored when `algorithm` is [`Algorithm::Pso`].
    pub aio_params: AioParams,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::Aio,
            benchmark: BenchmarkId::Sphere,
            dims: 30,
            runs: 5,
            base_seed: 0,
            pso_params: PsoParams::default(),
            aio_params: AioParams::default(),
            output_path: PathBuf::from("convergence.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn for_benchmark(algorithm: Algorithm, benchmark: BenchmarkId, dims: usize) -> Self {
        ExperimentConfig { algorithm, benchmark, dims, ..ExperimentConfig::default() }
    }

    pub fn benchmark_spec(&self) -> Result<BenchmarkSpec> {
        lookup(self.benchmark, self.dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims < 2 {
            return Err(Error::config(format!("dims must be >= 2, got {}", self.dims)));
        }
        if self.runs < 1 {
            return Err(Error::config(format!("runs must be >= 1, got {}", self.runs)));
        }
        self.pso_params.validate()?;
        if self.algorithm == Algorithm::Aio {
            self.aio_params.validate(self.dims)?;
        }
        Ok(())
    }

    /// Seed of run `run`.
    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

/// Best-so-far fitness after every iteration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub seed: u64,
    /// Global best of the freshly initialized population(s).
    pub initial_fitness: f64,
    pub best_per_iteration: Vec<f64>,
    /// Last trace entry, or `initial_fitness` for a zero-iteration run.
    pub final_fitness: f64,
}

impl RunTrace {
    pub fn new(seed: u64, initial_fitness: f64, best_per_iteration: Vec<f64>) -> Self {
        let final_fitness = best_per_iteration.last().copied().unwrap_or(initial_fitness);
        RunTrace { seed, initial_fitness, best_per_iteration, final_fitness }
    }
}

/// Runs `config.runs` independent runs, possibly in parallel. Run `r` uses
/// seed `base_seed + r`; traces come back in run order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|r| {
            let seed = config.seed_for(r);
            match config.algorithm {
                Algorithm::Pso => run_pso(config, seed),
                Algorithm::Aio => run_aio(config, seed),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    /// Pointwise mean of the run traces.
    pub mean_curve: Vec<f64>,
    pub finals: Vec<f64>,
    pub mean_initial: f64,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

pub fn aggregate(traces: &[RunTrace]) -> Result<SummaryStats> {
    let first = traces
        .first()
        .ok_or_else(|| Error::invalid("cannot aggregate zero traces"))?;
    let len = first.best_per_iteration.len();
    if let Some(t) = traces.iter().find(|t| t.best_per_iteration.len() != len) {
        return Err(Error::invalid(format!(
            "trace length mismatch: seed {} has {} entries, expected {len}",
            t.seed,
            t.best_per_iteration.len()
        )));
    }
    let n = traces.len() as f64;
    let mean_curve = (0..len)
        .map(|i| traces.iter().map(|t| t.best_per_iteration[i]).sum::<f64>() / n)
        .collect();
    let finals: Vec<f64> = traces.iter().map(|t| t.final_fitness).collect();
    let mut sorted = finals.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    Ok(SummaryStats {
        mean_curve,
        mean_initial: traces.iter().map(|t| t.initial_fitness).sum::<f64>() / n,
        mean: finals.iter().sum::<f64>() / n,
        median,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        finals,
    })
}
