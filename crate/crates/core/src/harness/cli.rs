use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use super::{aggregate, parse_config, run_experiment, write_csv, Algorithm, ExperimentConfig};
use crate::benchfn::BenchmarkId;
use crate::error::{Error, Result};

/// Run seeded PSO / AIO experiments and write the mean convergence curve as CSV.
#[derive(Debug, Parser)]
#[command(name = "aio-bench", version, about)]
struct Cli {
    /// XML experiment configuration
    #[arg(long)]
    config: PathBuf,

    /// Optimizer to run (pso | aio)
    #[arg(long)]
    algorithm: Option<String>,

    /// Benchmark function (sphere | rosenbrock | ackley | griewank | rastrigin)
    #[arg(long)]
    benchmark: Option<String>,

    /// Problem dimension
    #[arg(long)]
    dims: Option<usize>,

    /// Number of independent runs
    #[arg(long)]
    runs: Option<usize>,

    /// Seed of the first run; run r uses seed + r
    #[arg(long)]
    seed: Option<u64>,

    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,

    /// Iterations per run
    #[arg(long)]
    iterations: Option<usize>,

    /// Particles per population
    #[arg(long)]
    population_size: Option<usize>,

    #[arg(long)]
    c1: Option<f64>,

    #[arg(long)]
    c2: Option<f64>,

    /// Fixed inertia weight (baseline PSO)
    #[arg(long)]
    w: Option<f64>,

    #[arg(long)]
    w_max: Option<f64>,

    #[arg(long)]
    w_min: Option<f64>,

    /// Number of swarms the dimensions are split into
    #[arg(long)]
    tdr_factor: Option<usize>,

    #[arg(long)]
    elite_factor: Option<f64>,

    #[arg(long)]
    mutation_rate: Option<f64>,

    #[arg(long)]
    la_reward: Option<f64>,

    #[arg(long)]
    la_penalty: Option<f64>,
}

impl Cli {
    fn apply(self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(a) = &self.algorithm {
            config.algorithm = a.parse::<Algorithm>()?;
        }
        if let Some(b) = &self.benchmark {
            config.benchmark = b.parse::<BenchmarkId>()?;
        }
        let pso = &mut config.pso_params;
        let aio = &mut config.aio_params;
        macro_rules! set {
            ($($flag:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag { $target = v; })*
            };
        }
        set! {
            dims => config.dims,
            runs => config.runs,
            seed => config.base_seed,
            out => config.output_path,
            iterations => pso.max_iterations,
            population_size => pso.population_size,
            c1 => pso.c1,
            c2 => pso.c2,
            w => pso.w_fixed,
            w_max => pso.w_max,
            w_min => pso.w_min,
            tdr_factor => aio.swarm_count,
            elite_factor => aio.elite_factor,
            mutation_rate => aio.mutation_rate,
            la_reward => aio.la_reward,
            la_penalty => aio.la_penalty,
        }
        config.validate()
    }
}

fn load_config(cli: Cli) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(&cli.config).map_err(|source| Error::Io {
        path: cli.config.clone(),
        source,
    })?;
    let mut config = parse_config(&text).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", cli.config.display()),
        },
        Error::Config(msg) => Error::Config(format!("{}: {msg}", cli.config.display())),
        other => other,
    })?;
    cli.apply(&mut config)?;
    Ok(config)
}

fn execute(config: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let traces = run_experiment(config)?;
    let stats = aggregate(&traces)?;
    write_csv(&stats, &config.output_path)?;

    let io = |source| Error::Io { path: PathBuf::from("<stdout>"), source };
    writeln!(
        out,
        "{} on {} (dims {}, {} iterations, {} runs)",
        config.algorithm,
        config.benchmark,
        config.dims,
        config.pso_params.max_iterations,
        config.runs
    )
    .map_err(io)?;
    for t in &traces {
        writeln!(out, "  seed {:>6}  final {:.6e}", t.seed, t.final_fitness).map_err(io)?;
    }
    writeln!(
        out,
        "mean {:.6e}  median {:.6e}  min {:.6e}  max {:.6e}",
        stats.mean, stats.median, stats.min, stats.max
    )
    .map_err(io)?;
    writeln!(out, "wrote {}", config.output_path.display()).map_err(io)?;
    Ok(())
}

/// Parses `args` (program name first), runs the experiment and reports to the
/// given streams. Returns the process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match load_config(cli).and_then(|config| execute(&config, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn cli_main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
