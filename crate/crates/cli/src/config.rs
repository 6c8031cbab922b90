//! Benchmark configuration.

use std::path::PathBuf;

use serde::Serialize;

use skridge::{MomentumSchedule, SketchKind};

use crate::CliError;

/// Where the regression data comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSource {
    SyntheticDense { n: usize, d: usize },
    SyntheticSparse { n: usize, d: usize, density: f64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    Auto,
    Primal,
    Dual,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Sketch,
    Cg,
    Direct,
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Sketch => "sketch",
            SolverChoice::Cg => "cg",
            SolverChoice::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchChoice {
    Subsample,
    Gaussian,
    Count,
    Subcount,
    Srht,
}

impl SketchChoice {
    pub fn to_kind(self) -> SketchKind {
        match self {
            SketchChoice::Subsample => SketchKind::Subsample,
            SketchChoice::Gaussian => SketchKind::Gaussian,
            SketchChoice::Count => SketchKind::Count,
            SketchChoice::Subcount => SketchKind::SubCount,
            SketchChoice::Srht => SketchKind::Srht,
        }
    }

    pub fn name(&self) -> &'static str {
        self.to_kind().name()
    }
}

/// Momentum settings exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleChoice {
    None,
    Constant,
    Increasing,
    Heuristic,
}

impl ScheduleChoice {
    pub fn to_schedule(self) -> MomentumSchedule {
        match self {
            ScheduleChoice::None => MomentumSchedule::None,
            ScheduleChoice::Constant => MomentumSchedule::Constant,
            ScheduleChoice::Increasing => MomentumSchedule::TheoreticalIncreasing,
            ScheduleChoice::Heuristic => MomentumSchedule::Heuristic { eta: 0.5 },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScheduleChoice::None => "none",
            ScheduleChoice::Constant => "constant",
            ScheduleChoice::Increasing => "increasing",
            ScheduleChoice::Heuristic => "heuristic",
        }
    }
}

/// Sketch size: a fixed value or one of the size rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TauSpec {
    Absolute { tau: usize },
    /// ⌊m/4⌋.
    MOver4,
    /// ⌈m^(2/3)⌉.
    MTwoThirds,
}

impl TauSpec {
    /// Concrete sketch size for a system of order m, clamped into [1, m].
    pub fn resolve(&self, m: usize) -> usize {
        let raw = match self {
            TauSpec::Absolute { tau } => *tau,
            TauSpec::MOver4 => m / 4,
            TauSpec::MTwoThirds => (m as f64).powf(2.0 / 3.0).ceil() as usize,
        };
        raw.clamp(1, m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub source: ProblemSource,
    pub route: RouteChoice,
    pub sigma: f64,
    pub lambda: f64,
    pub solvers: Vec<SolverChoice>,
    pub sketches: Vec<SketchChoice>,
    pub schedules: Vec<ScheduleChoice>,
    pub tau: TauSpec,
    pub epsilon: f64,
    pub max_iter: usize,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let ProblemSource::SyntheticDense { n, d } | ProblemSource::SyntheticSparse { n, d, .. } =
            &self.source
        {
            if *n == 0 || *d == 0 {
                return Err(CliError::Config("n and d must be positive".into()));
            }
        }
        if let ProblemSource::SyntheticSparse { density, .. } = &self.source {
            if !(*density > 0.0 && *density <= 1.0) {
                return Err(CliError::Config(format!(
                    "density must lie in (0, 1], got {density}"
                )));
            }
        }
        if self.route == RouteChoice::Kernel && !(self.sigma > 0.0) {
            return Err(CliError::Config("kernel route needs sigma > 0".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(CliError::Config("lambda must be >= 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(CliError::Config("tolerance must be > 0".into()));
        }
        if self.repetitions == 0 {
            return Err(CliError::Config("repetitions must be >= 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(CliError::Config("at least one solver is required".into()));
        }
        if self.solvers.contains(&SolverChoice::Sketch) && self.sketches.is_empty() {
            return Err(CliError::Config(
                "the sketch solver needs at least one sketch kind".into(),
            ));
        }
        Ok(())
    }

    /// Seed of one repetition. Stable across runs of the same config.
    pub fn run_seed(&self, rep: usize) -> u64 {
        self.seed.wrapping_add(rep as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> BenchConfig {
        BenchConfig {
            source: ProblemSource::SyntheticDense { n: 10, d: 4 },
            route: RouteChoice::Auto,
            sigma: 1.0,
            lambda: 0.1,
            solvers: vec![SolverChoice::Sketch],
            sketches: vec![SketchChoice::Subsample],
            schedules: vec![ScheduleChoice::Heuristic],
            tau: TauSpec::MTwoThirds,
            epsilon: 1e-4,
            max_iter: 100,
            repetitions: 2,
            seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }

    #[test]
    fn tau_rules() {
        assert_eq!(TauSpec::MOver4.resolve(100), 25);
        assert_eq!(TauSpec::MOver4.resolve(3), 1);
        // 500^(2/3) = 62.99..., the rule takes the ceiling.
        assert_eq!(TauSpec::MTwoThirds.resolve(500), 63);
        assert_eq!(TauSpec::Absolute { tau: 40 }.resolve(20), 20);
        assert_eq!(TauSpec::Absolute { tau: 0 }.resolve(20), 1);
    }

    #[test]
    fn validation_catches_bad_inputs() {
        let mut c = base();
        c.epsilon = 0.0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.source = ProblemSource::SyntheticSparse {
            n: 5,
            d: 5,
            density: 1.5,
        };
        assert!(c.validate().is_err());

        let mut c = base();
        c.sketches.clear();
        assert!(c.validate().is_err());

        let mut c = base();
        c.route = RouteChoice::Kernel;
        c.sigma = 0.0;
        assert!(c.validate().is_err());

        assert!(base().validate().is_ok());
    }
}
