//! Library side of the benchmark CLI: configuration, data loading, the
//! benchmark matrix runner, and the trace/summary output formats.

pub mod config;
pub mod data;
pub mod runner;
pub mod summary;
pub mod trace;

pub use config::{
    BenchConfig, ProblemSource, RouteChoice, ScheduleChoice, SketchChoice, SolverChoice, TauSpec,
};
pub use runner::{grid_search_accel, run_benchmark, BenchOutcome};

/// Errors surfaced to the command line.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Solver(#[from] skridge::Error),
}
