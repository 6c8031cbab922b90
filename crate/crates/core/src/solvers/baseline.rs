//! Deterministic baselines: conjugate gradients and a dense direct solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::problem::RidgeProblem;
use crate::solvers::{SolveReport, SolverConfig};

/// Conjugate gradients on the SPD system, with the same stopping rule and
/// report shape as the sketching solvers. The sketch and seed fields of the
/// config are ignored.
pub fn solve_cg(problem: &RidgeProblem, config: &SolverConfig) -> Result<SolveReport> {
    if !(config.tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be > 0"));
    }
    let a = problem.a();
    let m = problem.dim();
    let mut w = vec![0.0; m];
    // r = b - A w = b at the zero start.
    let mut r = problem.b().to_vec();
    let r0_norm = norm2(&r);
    let start = std::time::Instant::now();
    if r0_norm == 0.0 {
        return Ok(SolveReport {
            iterations: 0,
            converged: true,
            residual_trace: vec![0.0],
            wall_times: vec![0.0],
            solution: w,
            final_residual: vec![0.0; m],
            refreshed_iterations: Vec::new(),
            iterates: config.record_iterates.then(|| vec![vec![0.0; m]]),
        });
    }
    let mut trace = vec![1.0];
    let mut walls = vec![0.0];
    let mut iterates = config.record_iterates.then(|| vec![w.clone()]);
    let mut p = r.clone();
    let mut rs_old = dot(&r, &r);
    let mut rel = 1.0;
    let mut converged = rel <= config.tolerance;
    let mut k = 0;
    while !converged && k < config.max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::contract(
                "conjugate gradients hit a non-positive curvature direction; the system is not positive definite",
            ));
        }
        let alpha = rs_old / pap;
        for j in 0..m {
            w[j] += alpha * p[j];
            r[j] -= alpha * ap[j];
        }
        let rs_new = dot(&r, &r);
        k += 1;
        rel = rs_new.sqrt() / r0_norm;
        trace.push(rel);
        walls.push(start.elapsed().as_secs_f64());
        if let Some(iterates) = &mut iterates {
            iterates.push(w.clone());
        }
        if !rel.is_finite() {
            return Err(Error::Diverged {
                iteration: k,
                relative_residual: rel,
                last_iterate: w,
            });
        }
        converged = rel <= config.tolerance;
        let beta = rs_new / rs_old;
        for j in 0..m {
            p[j] = r[j] + beta * p[j];
        }
        rs_old = rs_new;
    }
    // CG tracks b − A w; reports use the A w − b convention.
    let final_residual = r.iter().map(|v| -v).collect();
    Ok(SolveReport {
        iterations: k,
        converged,
        residual_trace: trace,
        wall_times: walls,
        solution: w,
        final_residual,
        refreshed_iterations: Vec::new(),
        iterates,
    })
}

/// Dense factorization solve: Cholesky, falling back to the eigenvalue
/// pseudoinverse for semidefinite systems (singular kernel matrices).
pub fn solve_direct(problem: &RidgeProblem) -> Result<Vec<f64>> {
    let dense = problem.a().to_dense();
    let m = dense.rows();
    let na = DMatrix::from_row_slice(m, m, dense.data());
    let b = DVector::from_column_slice(problem.b());
    if let Some(chol) = na.cholesky() {
        return Ok(chol.solve(&b).iter().copied().collect());
    }
    crate::linalg::least_norm_solution(&dense, problem.b())
}
