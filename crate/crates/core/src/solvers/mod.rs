//! Iterative solvers.
//!
//! All solvers share the same skeleton: start from w⁰ (zero unless warm
//! started), keep the residual r = A w − b updated through cheap
//! recurrences, and stop once ‖r‖/‖r⁰‖ drops to the configured tolerance
//! or the iteration budget runs out.
//!
//! The probabilistic solvers draw one sketch realization per iteration from
//! a counter-based generator seeded through the config, so a (problem,
//! config, seed) triple fully determines the run.

mod baseline;
mod schedule;

pub use baseline::{solve_cg, solve_direct};
pub use schedule::{
    schedule_step, EtaSchedule, EtaState, EtaStep, MomentumSchedule, ScheduleState, INCREASING_ETA,
};

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{least_norm_solution, norm2, Matrix};
use crate::problem::RidgeProblem;
use crate::sketch::{pad_to_power_of_two, SketchConfig, SketchKind};

/// Runs whose relative residual climbs past this are reported as diverged.
const DIVERGENCE_LIMIT: f64 = 1e8;

/// Knobs common to every iterative solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative residual target ε.
    pub tolerance: f64,
    pub max_iter: usize,
    pub sketch: SketchConfig,
    /// Step size γ in (0, 1]. Only the plain solver reads it; momentum
    /// variants get their step from the schedule.
    pub step_size: f64,
    pub seed: u64,
    /// Every N iterations, replace the maintained residual by a freshly
    /// computed A w − b. Zero disables refreshing.
    pub residual_refresh_every: usize,
    /// Store every iterate in the report. Memory grows with max_iter · m.
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(sketch: SketchConfig) -> Self {
        Self {
            tolerance: 1e-6,
            max_iter: 10_000,
            sketch,
            step_size: 1.0,
            seed: 0,
            residual_refresh_every: 0,
            record_iterates: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be > 0"));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::invalid("step size must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Relative residuals ‖r^k‖/‖r⁰‖ for k = 0..iterations. The leading
    /// entry is 1 except for a zero right-hand side, where the single entry
    /// is 0.
    pub residual_trace: Vec<f64>,
    /// Cumulative seconds at each trace entry.
    pub wall_times: Vec<f64>,
    pub solution: Vec<f64>,
    /// The maintained residual A w − b at exit, as the solver tracked it
    /// (not recomputed). Lets callers measure recurrence drift.
    pub final_residual: Vec<f64>,
    /// Iterations at which the residual was recomputed exactly.
    pub refreshed_iterations: Vec<usize>,
    /// Iterates w⁰..w^iterations when recording was requested.
    pub iterates: Option<Vec<Vec<f64>>>,
}

/// Acceleration parameters, constrained to 0 < μ ≤ 1/ν ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelParams {
    mu: f64,
    nu: f64,
}

impl AccelParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        const SLACK: f64 = 1e-9;
        if !(mu > 0.0) || !mu.is_finite() || !nu.is_finite() {
            return Err(Error::invalid(format!(
                "acceleration parameters must be finite with mu > 0, got mu={mu}, nu={nu}"
            )));
        }
        if nu < 1.0 - SLACK || mu * nu > 1.0 + SLACK {
            return Err(Error::invalid(format!(
                "acceleration parameters must satisfy 0 < mu <= 1/nu <= 1, got mu={mu}, nu={nu}"
            )));
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Trace, timing and iterate bookkeeping shared by every solver loop.
struct RunLog {
    start: Instant,
    trace: Vec<f64>,
    wall_times: Vec<f64>,
    iterates: Option<Vec<Vec<f64>>>,
    refreshed: Vec<usize>,
}

impl RunLog {
    fn new(record_iterates: bool, w0: &[f64]) -> Self {
        Self {
            start: Instant::now(),
            trace: vec![1.0],
            wall_times: vec![0.0],
            iterates: record_iterates.then(|| vec![w0.to_vec()]),
            refreshed: Vec::new(),
        }
    }

    fn push(&mut self, rel: f64, w: &[f64]) {
        self.trace.push(rel);
        self.wall_times.push(self.start.elapsed().as_secs_f64());
        if let Some(iterates) = &mut self.iterates {
            iterates.push(w.to_vec());
        }
    }

    fn into_report(
        self,
        iterations: usize,
        converged: bool,
        solution: Vec<f64>,
        final_residual: Vec<f64>,
    ) -> SolveReport {
        SolveReport {
            iterations,
            converged,
            residual_trace: self.trace,
            wall_times: self.wall_times,
            solution,
            final_residual,
            refreshed_iterations: self.refreshed,
            iterates: self.iterates,
        }
    }
}

/// Report for the degenerate b = 0 start: w⁰ is already optimal.
fn zero_rhs_report(config: &SolverConfig, w: Vec<f64>) -> SolveReport {
    let m = w.len();
    SolveReport {
        iterations: 0,
        converged: true,
        residual_trace: vec![0.0],
        wall_times: vec![0.0],
        solution: w.clone(),
        final_residual: vec![0.0; m],
        refreshed_iterations: Vec::new(),
        iterates: config.record_iterates.then(|| vec![w]),
    }
}

fn check_divergence(k: usize, rel: f64, w: &[f64], prev_w: &[f64]) -> Result<()> {
    if rel.is_finite() && rel <= DIVERGENCE_LIMIT {
        return Ok(());
    }
    let last_iterate = if w.iter().all(|v| v.is_finite()) {
        w.to_vec()
    } else {
        prev_w.to_vec()
    };
    Err(Error::Diverged {
        iteration: k,
        relative_residual: rel,
        last_iterate,
    })
}

/// Wraps a solver body with transparent zero-padding when the Hadamard
/// sketch meets a non power-of-two order. The reported solution (and any
/// recorded iterates) are restricted back to the original coordinates; the
/// residual trace is the padded system's, whose solution agrees with the
/// original on those coordinates.
fn run_padded<F>(problem: &RidgeProblem, config: &SolverConfig, w0: &[f64], body: F) -> Result<SolveReport>
where
    F: FnOnce(&RidgeProblem, &[f64]) -> Result<SolveReport>,
{
    if w0.len() != problem.dim() {
        return Err(Error::invalid(format!(
            "initial iterate length {} does not match system order {}",
            w0.len(),
            problem.dim()
        )));
    }
    if w0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial iterate has non-finite entries"));
    }
    let needs_pad =
        config.sketch.kind == SketchKind::Srht && !problem.dim().is_power_of_two();
    if !needs_pad {
        return body(problem, w0);
    }
    let (padded, original) = pad_to_power_of_two(problem);
    let mut start = w0.to_vec();
    start.resize(padded.dim(), 0.0);
    let mut report = body(&padded, &start).map_err(|e| match e {
        Error::Diverged {
            iteration,
            relative_residual,
            mut last_iterate,
        } => {
            last_iterate.truncate(original);
            Error::Diverged {
                iteration,
                relative_residual,
                last_iterate,
            }
        }
        other => other,
    })?;
    report.solution.truncate(original);
    report.final_residual.truncate(original);
    if let Some(iterates) = &mut report.iterates {
        for w in iterates {
            w.truncate(original);
        }
    }
    Ok(report)
}

/// Plain sketch-and-project from the zero start.
///
/// Per iteration: draw S, solve the sketched system
/// (SᵀAS) δ = Sᵀr for its least-norm solution, then take
/// w ← w − γ S δ and r ← r − γ (AS) δ.
pub fn solve_sketch_project(problem: &RidgeProblem, config: &SolverConfig) -> Result<SolveReport> {
    solve_sketch_project_from(problem, config, &vec![0.0; problem.dim()])
}

/// Warm-started variant; r⁰ is recomputed exactly from w⁰.
pub fn solve_sketch_project_from(
    problem: &RidgeProblem,
    config: &SolverConfig,
    w0: &[f64],
) -> Result<SolveReport> {
    config.validate()?;
    run_padded(problem, config, w0, |problem, w0| {
        let a = problem.a();
        let m = problem.dim();
        let gamma = config.step_size;
        let mut w = w0.to_vec();
        let mut r = problem.residual(&w);
        let r0_norm = norm2(&r);
        if r0_norm == 0.0 {
            return Ok(zero_rhs_report(config, w));
        }
        let mut log = RunLog::new(config.record_iterates, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut prev_w = w.clone();
        let mut rel = 1.0;
        let mut converged = rel <= config.tolerance;
        let mut k = 0;
        while !converged && k < config.max_iter {
            let state = config.sketch.draw(m, &mut rng)?;
            let out = state.apply(a, &r)?;
            let delta = least_norm_solution(&out.sas, &out.rs)?;
            prev_w.copy_from_slice(&w);
            state.apply_update(&mut w, &delta, gamma);
            let asd = out.sa.tr_matvec(&delta);
            for (ri, ai) in r.iter_mut().zip(&asd) {
                *ri -= gamma * ai;
            }
            k += 1;
            if config.residual_refresh_every > 0 && k % config.residual_refresh_every == 0 {
                r = problem.residual(&w);
                log.refreshed.push(k);
            }
            rel = norm2(&r) / r0_norm;
            log.push(rel, &w);
            check_divergence(k, rel, &w, &prev_w)?;
            converged = rel <= config.tolerance;
        }
        Ok(log.into_report(k, converged, w, r))
    })
}

/// Heavy-ball sketch-and-project:
/// w^{k+1} = (1+β_k) w^k − β_k w^{k−1} − γ_k S δ_k, with the residual kept
/// through the matching two-term recurrence.
pub fn solve_momentum(
    problem: &RidgeProblem,
    config: &SolverConfig,
    schedule: &MomentumSchedule,
) -> Result<SolveReport> {
    config.validate()?;
    schedule.validate()?;
    run_padded(problem, config, &vec![0.0; problem.dim()], |problem, w0| {
        let a = problem.a();
        let m = problem.dim();
        let mut w = w0.to_vec();
        let mut w_prev = w.clone();
        let mut w_next = w.clone();
        let mut r = problem.residual(&w);
        let r0_norm = norm2(&r);
        if r0_norm == 0.0 {
            return Ok(zero_rhs_report(config, w));
        }
        let mut r_prev = r.clone();
        let mut r_next = r.clone();
        let mut log = RunLog::new(config.record_iterates, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut sched = schedule.state();
        let mut rel = 1.0;
        let mut converged = rel <= config.tolerance;
        let mut k = 0;
        while !converged && k < config.max_iter {
            let (gamma, beta) = sched.next_params();
            let state = config.sketch.draw(m, &mut rng)?;
            let out = state.apply(a, &r)?;
            let delta = least_norm_solution(&out.sas, &out.rs)?;
            let sdelta = state.expand(&delta);
            let asd = out.sa.tr_matvec(&delta);
            for j in 0..m {
                w_next[j] = (1.0 + beta) * w[j] - beta * w_prev[j] - gamma * sdelta[j];
                r_next[j] = (1.0 + beta) * r[j] - beta * r_prev[j] - gamma * asd[j];
            }
            rotate(&mut w_prev, &mut w, &mut w_next);
            rotate(&mut r_prev, &mut r, &mut r_next);
            k += 1;
            if config.residual_refresh_every > 0 && k % config.residual_refresh_every == 0 {
                r = problem.residual(&w);
                log.refreshed.push(k);
            }
            rel = norm2(&r) / r0_norm;
            log.push(rel, &w);
            check_divergence(k, rel, &w, &w_prev)?;
            converged = rel <= config.tolerance;
        }
        Ok(log.into_report(k, converged, w, r))
    })
}

/// After the call: prev holds the old current, current holds the freshly
/// computed next, and next holds the old prev as scratch.
fn rotate(prev: &mut Vec<f64>, current: &mut Vec<f64>, next: &mut Vec<f64>) {
    std::mem::swap(prev, next);
    std::mem::swap(prev, current);
}

/// The averaging form of the momentum iteration:
/// z^k = z^{k−1} − η_k S δ_k and
/// w^{k+1} = (1 − c) w^k + c z^k with c = 1/(ζ_{k+1}+1).
///
/// Produces the same w iterates as [`solve_momentum`] run with the matching
/// (γ_k, β_k) mapping; kept as an independent implementation so the two
/// routes can be checked against each other.
pub fn solve_momentum_averaging_form(
    problem: &RidgeProblem,
    config: &SolverConfig,
    etas: EtaSchedule,
) -> Result<SolveReport> {
    config.validate()?;
    etas.validate()?;
    run_padded(problem, config, &vec![0.0; problem.dim()], |problem, w0| {
        let a = problem.a();
        let m = problem.dim();
        let mut w = w0.to_vec();
        let mut rw = problem.residual(&w);
        let r0_norm = norm2(&rw);
        if r0_norm == 0.0 {
            return Ok(zero_rhs_report(config, w));
        }
        let mut z = w.clone();
        let mut rz = rw.clone();
        let mut prev_w = w.clone();
        let mut log = RunLog::new(config.record_iterates, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut eta_state = EtaState::new(etas);
        let mut rel = 1.0;
        let mut converged = rel <= config.tolerance;
        let mut k = 0;
        while !converged && k < config.max_iter {
            let step = eta_state.next_step();
            let state = config.sketch.draw(m, &mut rng)?;
            let out = state.apply(a, &rw)?;
            let delta = least_norm_solution(&out.sas, &out.rs)?;
            let sdelta = state.expand(&delta);
            let asd = out.sa.tr_matvec(&delta);
            let c = 1.0 / (step.zeta_next + 1.0);
            prev_w.copy_from_slice(&w);
            for j in 0..m {
                z[j] -= step.eta * sdelta[j];
                rz[j] -= step.eta * asd[j];
                w[j] = (1.0 - c) * w[j] + c * z[j];
                rw[j] = (1.0 - c) * rw[j] + c * rz[j];
            }
            k += 1;
            if config.residual_refresh_every > 0 && k % config.residual_refresh_every == 0 {
                rw = problem.residual(&w);
                log.refreshed.push(k);
            }
            rel = norm2(&rw) / r0_norm;
            log.push(rel, &w);
            check_divergence(k, rel, &w, &prev_w)?;
            converged = rel <= config.tolerance;
        }
        Ok(log.into_report(k, converged, w, rw))
    })
}

/// Accelerated sketch-and-project. Three iterate sequences (w, v, z) with
/// coefficients derived from (μ, ν); three residuals are maintained and the
/// stopping rule watches ‖r_v‖/‖r_v⁰‖. With μ = ν = 1 the recursion
/// collapses onto plain sketch-and-project.
pub fn solve_accelerated(
    problem: &RidgeProblem,
    config: &SolverConfig,
    accel: AccelParams,
) -> Result<SolveReport> {
    config.validate()?;
    run_padded(problem, config, &vec![0.0; problem.dim()], |problem, w0| {
        let a = problem.a();
        let m = problem.dim();
        let beta = 1.0 - (accel.mu / accel.nu).sqrt();
        let gamma = 1.0 / (accel.mu * accel.nu).sqrt();
        let alpha = 1.0 / (1.0 + (accel.nu / accel.mu).sqrt());
        let mut w = w0.to_vec();
        let mut rw = problem.residual(&w);
        let r0_norm = norm2(&rw);
        if r0_norm == 0.0 {
            return Ok(zero_rhs_report(config, w));
        }
        let mut v = w.clone();
        let mut rv = rw.clone();
        let mut z = vec![0.0; m];
        let mut rz = vec![0.0; m];
        let mut prev_w = w.clone();
        let mut log = RunLog::new(config.record_iterates, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut rel = 1.0;
        let mut converged = rel <= config.tolerance;
        let mut k = 0;
        while !converged && k < config.max_iter {
            for j in 0..m {
                z[j] = alpha * v[j] + (1.0 - alpha) * w[j];
                rz[j] = alpha * rv[j] + (1.0 - alpha) * rw[j];
            }
            let state = config.sketch.draw(m, &mut rng)?;
            let out = state.apply(a, &rz)?;
            let delta = least_norm_solution(&out.sas, &out.rs)?;
            let g = state.expand(&delta);
            let ag = out.sa.tr_matvec(&delta);
            prev_w.copy_from_slice(&w);
            for j in 0..m {
                w[j] = z[j] - g[j];
                rw[j] = rz[j] - ag[j];
                v[j] = beta * v[j] + (1.0 - beta) * z[j] - gamma * g[j];
                rv[j] = beta * rv[j] + (1.0 - beta) * rz[j] - gamma * ag[j];
            }
            k += 1;
            if config.residual_refresh_every > 0 && k % config.residual_refresh_every == 0 {
                rw = problem.residual(&w);
                rv = problem.residual(&v);
                log.refreshed.push(k);
            }
            rel = norm2(&rv) / r0_norm;
            log.push(rel, &w);
            check_divergence(k, rel, &w, &prev_w)?;
            converged = rel <= config.tolerance;
        }
        Ok(log.into_report(k, converged, w, rw))
    })
}

/// Discrete distribution over coordinates with p_i = A_ii / trace(A),
/// sampled by inverting the cumulative sums.
#[derive(Debug, Clone)]
pub struct CoordinateSampler {
    cumulative: Vec<f64>,
    total: f64,
}

/// Builds the diagonal-proportional coordinate distribution. Every diagonal
/// entry must be positive, which holds for any regularized system.
pub fn coordinate_sampler(a: &Matrix) -> Result<CoordinateSampler> {
    let m = a.rows();
    if m == 0 || a.cols() != m {
        return Err(Error::invalid("coordinate sampler needs a square matrix"));
    }
    let mut cumulative = Vec::with_capacity(m);
    let mut total = 0.0;
    for i in 0..m {
        let d = a.diag(i);
        if !(d > 0.0) {
            return Err(Error::invalid(format!(
                "coordinate sampler requires positive diagonal, entry {i} is {d}"
            )));
        }
        total += d;
        cumulative.push(total);
    }
    Ok(CoordinateSampler { cumulative, total })
}

impl CoordinateSampler {
    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = (c - prev) / self.total;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.total;
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&u).expect("cumulative sums are finite"))
        {
            Ok(i) => i + 1,
            Err(i) => i,
        };
        idx.min(self.cumulative.len() - 1)
    }
}

/// Coordinate descent with momentum: the τ = 1 specialization where S = e_i
/// drawn from [`coordinate_sampler`], so the inner solve collapses to
/// δ = r_i / A_ii and the residual update touches one row of A.
pub fn solve_cd_momentum(
    problem: &RidgeProblem,
    config: &SolverConfig,
    schedule: &MomentumSchedule,
) -> Result<SolveReport> {
    config.validate()?;
    schedule.validate()?;
    let a = problem.a();
    let m = problem.dim();
    let sampler = coordinate_sampler(a)?;
    let mut w = vec![0.0; m];
    let mut r = problem.residual(&w);
    let r0_norm = norm2(&r);
    if r0_norm == 0.0 {
        return Ok(zero_rhs_report(config, w));
    }
    let mut w_prev = w.clone();
    let mut w_next = w.clone();
    let mut r_prev = r.clone();
    let mut r_next = r.clone();
    let mut log = RunLog::new(config.record_iterates, &w);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sched = schedule.state();
    let mut rel = 1.0;
    let mut converged = rel <= config.tolerance;
    let mut k = 0;
    while !converged && k < config.max_iter {
        let (gamma, beta) = sched.next_params();
        let i = sampler.sample(&mut rng);
        let delta = r[i] / a.diag(i);
        if beta == 0.0 {
            // No momentum: only coordinate i of w moves.
            w_prev.copy_from_slice(&w);
            r_prev.copy_from_slice(&r);
            w[i] -= gamma * delta;
            subtract_scaled_row(a, i, gamma * delta, &mut r);
        } else {
            for j in 0..m {
                w_next[j] = (1.0 + beta) * w[j] - beta * w_prev[j];
                r_next[j] = (1.0 + beta) * r[j] - beta * r_prev[j];
            }
            w_next[i] -= gamma * delta;
            subtract_scaled_row(a, i, gamma * delta, &mut r_next);
            rotate(&mut w_prev, &mut w, &mut w_next);
            rotate(&mut r_prev, &mut r, &mut r_next);
        }
        k += 1;
        if config.residual_refresh_every > 0 && k % config.residual_refresh_every == 0 {
            r = problem.residual(&w);
            log.refreshed.push(k);
        }
        rel = norm2(&r) / r0_norm;
        log.push(rel, &w);
        check_divergence(k, rel, &w, &w_prev)?;
        converged = rel <= config.tolerance;
    }
    Ok(log.into_report(k, converged, w, r))
}

/// out ← out − scale · (row i of A), using row sparsity when available.
fn subtract_scaled_row(a: &Matrix, i: usize, scale: f64, out: &mut [f64]) {
    match a {
        Matrix::Dense(d) => {
            for (o, &v) in out.iter_mut().zip(d.row(i)) {
                *o -= scale * v;
            }
        }
        Matrix::Csr(s) => {
            let (cols, vals) = s.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[j] -= scale * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::problem::RidgeProblem;

    fn spd_problem(m: usize, seed: u64) -> RidgeProblem {
        let mut lcg = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        let mut next = move || {
            lcg = lcg.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            ((lcg >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let g = DenseMatrix::from_fn(m, m, |_, _| next());
        let mut a = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += g.get(k, i) * g.get(k, j);
                }
                a.set(i, j, acc + if i == j { 1.0 } else { 0.0 });
            }
        }
        a.symmetrize();
        let b: Vec<f64> = (0..m).map(|_| next()).collect();
        RidgeProblem::from_system(Matrix::Dense(a), b).unwrap()
    }

    fn cfg(kind: SketchKind, tau: usize) -> SolverConfig {
        let mut c = SolverConfig::new(SketchConfig::new(kind, tau));
        c.tolerance = 1e-10;
        c.max_iter = 5000;
        c.seed = 7;
        c
    }

    #[test]
    fn full_subsample_converges_in_one_iteration() {
        for m in [3usize, 8, 20] {
            let p = spd_problem(m, 41 + m as u64);
            let report = solve_sketch_project(&p, &cfg(SketchKind::Subsample, m)).unwrap();
            assert_eq!(report.iterations, 1, "m={m}");
            assert!(report.converged);
            assert!(*report.residual_trace.last().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let a = Matrix::Dense(DenseMatrix::identity(5));
        let p = RidgeProblem::from_system(a, vec![0.0; 5]).unwrap();
        let report = solve_sketch_project(&p, &cfg(SketchKind::Subsample, 2)).unwrap();
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
        assert_eq!(report.residual_trace, vec![0.0]);
    }

    #[test]
    fn every_sketch_kind_converges_on_a_small_system() {
        let p = spd_problem(16, 3);
        let direct = solve_direct(&p).unwrap();
        for kind in SketchKind::ALL {
            let mut c = cfg(kind, 4);
            c.tolerance = 1e-8;
            c.max_iter = 20_000;
            let report = solve_sketch_project(&p, &c).unwrap_or_else(|e| panic!("{kind}: {e}"));
            assert!(report.converged, "{kind} did not converge");
            for (x, y) in report.solution.iter().zip(&direct) {
                assert!((x - y).abs() < 1e-6, "{kind} solution mismatch");
            }
        }
    }

    #[test]
    fn srht_pads_odd_orders_transparently() {
        let p = spd_problem(11, 9);
        let mut c = cfg(SketchKind::Srht, 4);
        c.tolerance = 1e-8;
        c.max_iter = 20_000;
        let report = solve_sketch_project(&p, &c).unwrap();
        assert!(report.converged);
        assert_eq!(report.solution.len(), 11);
        let direct = solve_direct(&p).unwrap();
        for (x, y) in report.solution.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn identical_seeds_reproduce_traces() {
        let p = spd_problem(12, 5);
        let mut c = cfg(SketchKind::Count, 3);
        c.tolerance = 1e-9;
        let a = solve_sketch_project(&p, &c).unwrap();
        let b = solve_sketch_project(&p, &c).unwrap();
        assert_eq!(a.residual_trace, b.residual_trace);
        assert_eq!(a.solution, b.solution);
        c.seed = 8;
        let d = solve_sketch_project(&p, &c).unwrap();
        assert_ne!(a.residual_trace, d.residual_trace);
    }

    #[test]
    fn momentum_with_zero_beta_matches_plain() {
        let p = spd_problem(10, 21);
        let mut c = cfg(SketchKind::Subsample, 3);
        c.tolerance = 1e-12;
        c.max_iter = 200;
        let plain = solve_sketch_project(&p, &c).unwrap();
        let mom = solve_momentum(&p, &c, &MomentumSchedule::None).unwrap();
        assert_eq!(plain.iterations, mom.iterations);
        for (x, y) in plain.solution.iter().zip(&mom.solution) {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
        for (x, y) in plain.residual_trace.iter().zip(&mom.residual_trace) {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
    }

    #[test]
    fn warm_start_at_exact_solution_stops_fast() {
        let p = spd_problem(8, 2);
        let solution = solve_direct(&p).unwrap();
        let mut c = cfg(SketchKind::Subsample, 2);
        c.tolerance = 1e-4;
        // Relative residual starts at 1 by definition, but converging from
        // the exact solution takes no more than a couple of projections.
        let report = solve_sketch_project_from(&p, &c, &solution).unwrap();
        assert!(report.converged);
    }

    #[test]
    fn accelerated_unit_params_match_plain_bitwise() {
        let p = spd_problem(10, 33);
        let mut c = cfg(SketchKind::Subsample, 2);
        c.tolerance = 1e-9;
        c.max_iter = 3000;
        let plain = solve_sketch_project(&p, &c).unwrap();
        let accel =
            solve_accelerated(&p, &c, AccelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(plain.iterations, accel.iterations);
        for (x, y) in plain
            .residual_trace
            .iter()
            .zip(&accel.residual_trace)
        {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        for (x, y) in plain.solution.iter().zip(&accel.solution) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn accel_params_validate_domain() {
        assert!(AccelParams::new(0.0, 1.0).is_err());
        assert!(AccelParams::new(0.5, 0.5).is_err());
        assert!(AccelParams::new(0.5, 3.0).is_err());
        assert!(AccelParams::new(0.2, 3.0).is_ok());
    }

    #[test]
    fn coordinate_sampler_probabilities() {
        let a = Matrix::Dense(
            DenseMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 3.0]).unwrap(),
        );
        let s = coordinate_sampler(&a).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.25).abs() < 1e-15);
        assert!((p[1] - 0.75).abs() < 1e-15);

        let id = Matrix::Dense(DenseMatrix::identity(4));
        let s = coordinate_sampler(&id).unwrap();
        for p in s.probabilities() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn coordinate_sampler_frequencies_match() {
        let a = Matrix::Dense(
            DenseMatrix::new(3, 3, vec![2.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 3.0]).unwrap(),
        );
        let sampler = coordinate_sampler(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = [0usize; 3];
        let draws = 100_000;
        for _ in 0..draws {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let expect = [0.2, 0.5, 0.3];
        for (c, e) in counts.iter().zip(&expect) {
            let freq = *c as f64 / draws as f64;
            assert!((freq - e).abs() < 0.01, "freq {freq} vs {e}");
        }
    }

    #[test]
    fn cd_solves_one_dimensional_systems_in_one_step() {
        let a = Matrix::Dense(DenseMatrix::new(1, 1, vec![4.0]).unwrap());
        let p = RidgeProblem::from_system(a, vec![8.0]).unwrap();
        let report = solve_cd_momentum(&p, &cfg(SketchKind::Subsample, 1), &MomentumSchedule::None)
            .unwrap();
        assert_eq!(report.iterations, 1);
        assert!((report.solution[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cd_on_diagonal_zeroes_one_residual_entry_per_step() {
        let a = Matrix::Dense(DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 2.0]).unwrap());
        let p = RidgeProblem::from_system(a, vec![2.0, 2.0]).unwrap();
        let mut c = cfg(SketchKind::Subsample, 1);
        c.tolerance = 1e-14;
        c.max_iter = 50;
        let report = solve_cd_momentum(&p, &c, &MomentumSchedule::None).unwrap();
        assert!(report.converged);
        for (x, y) in report.solution.iter().zip(&[1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = spd_problem(4, 1);
        let mut c = cfg(SketchKind::Subsample, 2);
        c.tolerance = 0.0;
        assert!(solve_sketch_project(&p, &c).is_err());
        let mut c = cfg(SketchKind::Subsample, 9);
        c.tolerance = 1e-6;
        assert!(solve_sketch_project(&p, &c).is_err());
        let mut c = cfg(SketchKind::Subsample, 2);
        c.step_size = 1.5;
        assert!(solve_sketch_project(&p, &c).is_err());
    }
}
