//! Benchmark orchestration: build the problem once, run the
//! solver × sketch × schedule cross product with seeded repetitions, and
//! write trace CSVs plus a summary JSON.

use std::path::{Path, PathBuf};
use std::time::Instant;

use skridge::theory::DiscreteSketchEnsemble;
use skridge::{
    auto_select, build_dual, build_kernel, build_primal, solve_cg, solve_direct, solve_momentum,
    solve_sketch_project, Error as CoreError, Matrix, RidgeProblem, SketchConfig, SketchKind,
    SolveReport, SolverConfig,
};

use crate::config::{BenchConfig, ProblemSource, RouteChoice, ScheduleChoice, SolverChoice};
use crate::data;
use crate::summary::{
    quartiles, BenchSummary, CertificateSummary, CombinationSummary, RunSummary,
};
use crate::trace::{emit_trace_csv, TraceRecord};
use crate::CliError;

/// Order up to which spectral certificates are computed for the summary.
const CERTIFICATE_DIM_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOutcome {
    /// Every combination had at least one non-diverged run.
    Clean,
    /// Some combination diverged on every repetition.
    CombinationDiverged,
}

#[derive(Debug, Clone)]
struct Combination {
    solver: SolverChoice,
    sketch: Option<crate::config::SketchChoice>,
    schedule: Option<ScheduleChoice>,
}

impl Combination {
    fn label(&self) -> String {
        let mut parts = vec![self.solver.name().to_string()];
        if let Some(s) = self.sketch {
            parts.push(s.name().to_string());
        }
        if let Some(s) = self.schedule {
            parts.push(s.name().to_string());
        }
        parts.join("_")
    }
}

pub fn load_problem_data(config: &BenchConfig) -> Result<(Matrix, Vec<f64>), CliError> {
    Ok(match &config.source {
        ProblemSource::SyntheticDense { n, d } => data::generate_dense(*n, *d, config.seed),
        ProblemSource::SyntheticSparse { n, d, density } => {
            data::generate_sparse(*n, *d, *density, config.seed)
        }
        ProblemSource::Csv { path } => data::load_csv(path)?,
    })
}

pub fn build_problem(config: &BenchConfig, x: Matrix, y: &[f64]) -> Result<RidgeProblem, CliError> {
    let problem = match config.route {
        RouteChoice::Auto => auto_select(x, y, config.lambda)?,
        RouteChoice::Primal => build_primal(x, y, config.lambda)?,
        RouteChoice::Dual => build_dual(x, y, config.lambda)?,
        RouteChoice::Kernel => build_kernel(x, y, config.lambda, config.sigma)?,
    };
    Ok(problem)
}

fn solver_config(config: &BenchConfig, sketch: SketchConfig, rep: usize) -> SolverConfig {
    let mut sc = SolverConfig::new(sketch);
    sc.tolerance = config.epsilon;
    sc.max_iter = config.max_iter;
    sc.seed = config.run_seed(rep);
    sc
}

/// Runs one repetition of one combination. Divergence is reported as data,
/// any other error aborts the benchmark.
fn execute(
    problem: &RidgeProblem,
    config: &BenchConfig,
    combo: &Combination,
    tau: usize,
    rep: usize,
) -> Result<(SolveReport, bool), CliError> {
    let placeholder = SketchConfig::new(SketchKind::Subsample, 1.min(problem.dim()));
    let result = match combo.solver {
        SolverChoice::Sketch => {
            let sketch = SketchConfig::new(combo.sketch.expect("sketch combos carry a kind").to_kind(), tau);
            let sc = solver_config(config, sketch, rep);
            match combo.schedule.expect("sketch combos carry a schedule") {
                ScheduleChoice::None => solve_sketch_project(problem, &sc),
                other => solve_momentum(problem, &sc, &other.to_schedule()),
            }
        }
        SolverChoice::Cg => solve_cg(problem, &solver_config(config, placeholder, rep)),
        SolverChoice::Direct => {
            let start = Instant::now();
            solve_direct(problem).map(|solution| {
                let elapsed = start.elapsed().as_secs_f64();
                let residual = problem.residual(&solution);
                let b_norm = skridge::linalg::norm2(problem.b());
                let rel = if b_norm > 0.0 {
                    skridge::linalg::norm2(&residual) / b_norm
                } else {
                    0.0
                };
                SolveReport {
                    iterations: 1,
                    converged: rel <= config.epsilon.max(1e-10),
                    residual_trace: vec![1.0, rel],
                    wall_times: vec![0.0, elapsed],
                    solution,
                    final_residual: residual,
                    refreshed_iterations: Vec::new(),
                    iterates: None,
                }
            })
        }
    };
    match result {
        Ok(report) => Ok((report, false)),
        Err(CoreError::Diverged {
            iteration,
            relative_residual,
            last_iterate,
        }) => {
            let report = SolveReport {
                iterations: iteration,
                converged: false,
                residual_trace: vec![1.0, relative_residual],
                wall_times: vec![0.0, 0.0],
                solution: last_iterate,
                final_residual: Vec::new(),
                refreshed_iterations: Vec::new(),
                iterates: None,
            };
            Ok((report, true))
        }
        Err(other) => Err(other.into()),
    }
}

fn certificate_for(
    problem: &RidgeProblem,
    combo: &Combination,
    tau: usize,
) -> Option<CertificateSummary> {
    let m = problem.dim();
    if m > CERTIFICATE_DIM_CAP {
        return None;
    }
    let dense = problem.a().to_dense();
    let (values, _) = skridge::linalg::eig_sym(&dense).ok()?;
    let lambda_min_a = values[0];
    let lambda_max_a = *values.last()?;
    if !(lambda_min_a > 0.0) {
        return None;
    }
    let mut summary = CertificateSummary {
        rho: None,
        lambda_min_eh: None,
        trace_a: dense.trace(),
        lambda_min_a,
        lambda_max_a,
        kappa: lambda_max_a / lambda_min_a,
        mu: None,
        nu: None,
    };
    // Full rate certificates need an enumerable ensemble; single-index
    // subsampling is the case the theory module enumerates exactly.
    if combo.solver == SolverChoice::Sketch
        && combo.sketch == Some(crate::config::SketchChoice::Subsample)
        && tau == 1
    {
        let ensemble = DiscreteSketchEnsemble::single_column_uniform(m);
        if let Ok(cert) = skridge::theory::certificate(&dense, &ensemble) {
            summary.rho = Some(cert.rho);
            summary.lambda_min_eh = Some(cert.lambda_min_eh);
            summary.mu = cert.mu;
            summary.nu = cert.nu;
        }
    }
    Some(summary)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Runs the whole benchmark matrix. Returns whether any combination
/// diverged across all repetitions.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchOutcome, CliError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", config.out_dir.display())))?;

    let setup_start = Instant::now();
    let (x, y) = load_problem_data(config)?;
    let problem = build_problem(config, x, y.as_slice())?;
    let setup_seconds = setup_start.elapsed().as_secs_f64();
    let m = problem.dim();
    let tau = config.tau.resolve(m);

    let mut combinations = Vec::new();
    for &solver in &config.solvers {
        match solver {
            SolverChoice::Sketch => {
                for &sketch in &config.sketches {
                    for &schedule in &config.schedules {
                        combinations.push(Combination {
                            solver,
                            sketch: Some(sketch),
                            schedule: Some(schedule),
                        });
                    }
                }
            }
            _ => combinations.push(Combination {
                solver,
                sketch: None,
                schedule: None,
            }),
        }
    }

    let mut outcome = BenchOutcome::Clean;
    let mut combo_summaries = Vec::with_capacity(combinations.len());
    for combo in &combinations {
        let label = combo.label();
        let mut runs = Vec::with_capacity(config.repetitions);
        let mut all_diverged = true;
        for rep in 0..config.repetitions {
            let (report, diverged) = execute(&problem, config, combo, tau, rep)?;
            all_diverged &= diverged;

            let records: Vec<TraceRecord> = report
                .residual_trace
                .iter()
                .zip(&report.wall_times)
                .enumerate()
                .map(|(k, (rel, secs))| TraceRecord {
                    run: rep,
                    solver: combo.solver.name().to_string(),
                    sketch: combo.sketch.map_or("-".into(), |s| s.name().to_string()),
                    schedule: combo.schedule.map_or("-".into(), |s| s.name().to_string()),
                    iter: k,
                    rel_residual: *rel,
                    seconds: *secs,
                })
                .collect();
            let trace_path = config.out_dir.join(format!("{label}_rep{rep}.csv"));
            write_file(&trace_path, &emit_trace_csv(&records))?;

            runs.push(RunSummary {
                run: rep,
                seed: config.run_seed(rep),
                iterations: report.iterations,
                converged: report.converged,
                diverged,
                seconds: *report.wall_times.last().unwrap_or(&0.0),
                final_rel_residual: *report.residual_trace.last().unwrap_or(&f64::NAN),
            });
        }
        if all_diverged {
            outcome = BenchOutcome::CombinationDiverged;
        }
        let iter_samples: Vec<f64> = runs.iter().map(|r| r.iterations as f64).collect();
        let secs_samples: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
        let converged_fraction =
            runs.iter().filter(|r| r.converged).count() as f64 / runs.len() as f64;
        combo_summaries.push(CombinationSummary {
            solver: combo.solver.name().to_string(),
            sketch: combo.sketch.map(|s| s.name().to_string()),
            schedule: combo.schedule.map(|s| s.name().to_string()),
            tau: (combo.solver == SolverChoice::Sketch).then_some(tau),
            iterations: quartiles(&iter_samples),
            seconds: quartiles(&secs_samples),
            converged_fraction,
            certificate: certificate_for(&problem, combo, tau),
            runs,
        });
    }

    let summary = BenchSummary {
        config: config.clone(),
        m,
        route: problem.route().to_string(),
        tau,
        setup_seconds,
        combinations: combo_summaries,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Config(format!("summary serialization: {e}")))?;
    write_file(&config.out_dir.join("summary.json"), &json)?;
    Ok(outcome)
}

pub const GRID_HEADER: &str = "mu,nu,feasible,mean_seconds,converged_fraction";

/// Acceleration grid search: every feasible (μ, ν) pair is timed over the
/// configured repetitions; infeasible pairs are kept in the output, marked
/// and without metrics.
pub fn grid_search_accel(
    config: &BenchConfig,
    mu_grid: &[f64],
    nu_grid: &[f64],
) -> Result<PathBuf, CliError> {
    config.validate()?;
    if mu_grid.is_empty() || nu_grid.is_empty() {
        return Err(CliError::Config("both grids need at least one value".into()));
    }
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", config.out_dir.display())))?;
    let (x, y) = load_problem_data(config)?;
    let problem = build_problem(config, x, y.as_slice())?;
    let m = problem.dim();
    let tau = config.tau.resolve(m);
    let sketch_kind = config
        .sketches
        .first()
        .copied()
        .unwrap_or(crate::config::SketchChoice::Subsample)
        .to_kind();

    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for &mu in mu_grid {
        for &nu in nu_grid {
            let params = skridge::AccelParams::new(mu, nu);
            match params {
                Err(_) => {
                    // Outside 0 < mu <= 1/nu <= 1: skipped but recorded.
                    out.push_str(&format!("{mu},{nu},0,,\n"));
                }
                Ok(params) => {
                    let mut times = Vec::new();
                    let mut converged = 0usize;
                    for rep in 0..config.repetitions {
                        let sc =
                            solver_config(config, SketchConfig::new(sketch_kind, tau), rep);
                        match skridge::solve_accelerated(&problem, &sc, params) {
                            Ok(report) => {
                                if report.converged {
                                    converged += 1;
                                    times.push(*report.wall_times.last().unwrap_or(&0.0));
                                }
                            }
                            Err(CoreError::Diverged { .. }) => {}
                            Err(other) => return Err(other.into()),
                        }
                    }
                    let fraction = converged as f64 / config.repetitions as f64;
                    if times.is_empty() {
                        out.push_str(&format!("{mu},{nu},1,,{fraction}\n"));
                    } else {
                        let mean = times.iter().sum::<f64>() / times.len() as f64;
                        out.push_str(&format!("{mu},{nu},1,{mean},{fraction}\n"));
                    }
                }
            }
        }
    }
    let path = config.out_dir.join("accel_grid.csv");
    write_file(&path, &out)?;
    Ok(path)
}
