use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skridge_cli::{
    grid_search_accel, run_benchmark, BenchConfig, BenchOutcome, CliError, ProblemSource,
    RouteChoice, ScheduleChoice, SketchChoice, SolverChoice, TauSpec,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Dense,
    Sparse,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    Primal,
    Dual,
    Kernel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Sketch,
    Cg,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SketchArg {
    Subsample,
    Gaussian,
    Count,
    Subcount,
    Srht,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MomentumArg {
    None,
    Constant,
    Increasing,
    Heuristic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TauRuleArg {
    /// tau = floor(m / 4)
    M4,
    /// tau = ceil(m^(2/3))
    M23,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Problem source.
    #[arg(long, value_enum, default_value = "dense")]
    problem: ProblemArg,

    /// Rows of the synthetic data matrix.
    #[arg(long, default_value_t = 500)]
    n: usize,

    /// Columns of the synthetic data matrix.
    #[arg(long, default_value_t = 100)]
    d: usize,

    /// Nonzero fraction for sparse synthetic data.
    #[arg(long, default_value_t = 0.25)]
    density: f64,

    /// CSV file with numeric columns, last column is the target.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// System formulation.
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,

    /// Kernel bandwidth (kernel route only).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,

    /// Ridge regularization strength.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,

    /// Solvers to run (repeatable).
    #[arg(long = "solver", value_enum, default_values_t = [SolverArg::Sketch])]
    solvers: Vec<SolverArg>,

    /// Sketch kinds for the sketch solver (repeatable).
    #[arg(long = "sketch", value_enum, default_values_t = [SketchArg::Subsample])]
    sketches: Vec<SketchArg>,

    /// Momentum schedules for the sketch solver (repeatable).
    #[arg(long = "momentum", value_enum, default_values_t = [MomentumArg::Heuristic])]
    schedules: Vec<MomentumArg>,

    /// Fixed sketch size (overrides --tau-rule).
    #[arg(long, conflicts_with = "tau_rule")]
    tau: Option<usize>,

    /// Sketch size rule.
    #[arg(long, value_enum, default_value = "m23")]
    tau_rule: TauRuleArg,

    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    /// Iteration budget per run.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,

    /// Seeded repetitions per combination.
    #[arg(long, default_value_t = 10)]
    reps: usize,

    /// Base random seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output directory for trace CSVs and the summary JSON.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

impl BenchArgs {
    fn into_config(self) -> Result<BenchConfig, CliError> {
        let source = match self.problem {
            ProblemArg::Dense => ProblemSource::SyntheticDense { n: self.n, d: self.d },
            ProblemArg::Sparse => ProblemSource::SyntheticSparse {
                n: self.n,
                d: self.d,
                density: self.density,
            },
            ProblemArg::Csv => {
                let path = self.csv.ok_or_else(|| {
                    CliError::Config("--problem csv requires --csv PATH".into())
                })?;
                ProblemSource::Csv { path }
            }
        };
        let tau = match self.tau {
            Some(tau) => TauSpec::Absolute { tau },
            None => match self.tau_rule {
                TauRuleArg::M4 => TauSpec::MOver4,
                TauRuleArg::M23 => TauSpec::MTwoThirds,
            },
        };
        Ok(BenchConfig {
            source,
            route: match self.route {
                RouteArg::Auto => RouteChoice::Auto,
                RouteArg::Primal => RouteChoice::Primal,
                RouteArg::Dual => RouteChoice::Dual,
                RouteArg::Kernel => RouteChoice::Kernel,
            },
            sigma: self.sigma,
            lambda: self.lambda,
            solvers: self
                .solvers
                .iter()
                .map(|s| match s {
                    SolverArg::Sketch => SolverChoice::Sketch,
                    SolverArg::Cg => SolverChoice::Cg,
                    SolverArg::Direct => SolverChoice::Direct,
                })
                .collect(),
            sketches: self
                .sketches
                .iter()
                .map(|s| match s {
                    SketchArg::Subsample => SketchChoice::Subsample,
                    SketchArg::Gaussian => SketchChoice::Gaussian,
                    SketchArg::Count => SketchChoice::Count,
                    SketchArg::Subcount => SketchChoice::Subcount,
                    SketchArg::Srht => SketchChoice::Srht,
                })
                .collect(),
            schedules: self
                .schedules
                .iter()
                .map(|s| match s {
                    MomentumArg::None => ScheduleChoice::None,
                    MomentumArg::Constant => ScheduleChoice::Constant,
                    MomentumArg::Increasing => ScheduleChoice::Increasing,
                    MomentumArg::Heuristic => ScheduleChoice::Heuristic,
                })
                .collect(),
            tau,
            epsilon: self.tol,
            max_iter: self.max_iter,
            repetitions: self.reps,
            seed: self.seed,
            out_dir: self.out,
        })
    }
}

/// Benchmark harness for sketch-and-project ridge regression solvers.
///
/// Without a subcommand, runs the solver/sketch/momentum benchmark matrix
/// and writes per-run residual traces plus a summary JSON.
#[derive(Debug, Parser)]
#[command(name = "skridge", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    bench: BenchArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time the accelerated solver over a grid of (mu, nu) pairs.
    AccelGrid {
        #[command(flatten)]
        bench: BenchArgs,

        /// Comma-separated mu values.
        #[arg(long, value_delimiter = ',', required = true)]
        mu_grid: Vec<f64>,

        /// Comma-separated nu values.
        #[arg(long, value_delimiter = ',', required = true)]
        nu_grid: Vec<f64>,
    },
}

fn run(cli: Cli) -> Result<BenchOutcome, CliError> {
    match cli.command {
        None => {
            let config = cli.bench.into_config()?;
            run_benchmark(&config)
        }
        Some(Command::AccelGrid {
            bench,
            mu_grid,
            nu_grid,
        }) => {
            let config = bench.into_config()?;
            let path = grid_search_accel(&config, &mu_grid, &nu_grid)?;
            eprintln!("grid written to {}", path.display());
            Ok(BenchOutcome::Clean)
        }
    }
}

fn main() -> ExitCode {
    // clap itself exits with code 2 on malformed flags.
    let cli = Cli::parse();
    match run(cli) {
        Ok(BenchOutcome::Clean) => ExitCode::SUCCESS,
        Ok(BenchOutcome::CombinationDiverged) => {
            eprintln!("at least one combination diverged on every repetition");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
