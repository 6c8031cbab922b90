//! Rate quantities cross-checked against Monte-Carlo sampling and solver
//! behaviour, plus the primal/dual/kernel reduction identities.

mod common;

use common::{a_norm_sq, random_spd, random_vector, rng, sub};
use skridge::linalg::eig_sym;
use skridge::theory::{
    expected_projection, expected_projection_mc, momentum_bound_general, rate_rho,
    DiscreteSketchEnsemble,
};
use skridge::{
    build_dual, build_kernel, build_primal, recover_weights, solve_direct, solve_sketch_project,
    DenseMatrix, Matrix, MomentumSchedule, RidgeProblem, SketchConfig, SketchKind, SolverConfig,
};

/// Monte-Carlo draws of the real sketch sampler reproduce the enumerated
/// expected projection and its rate.
#[test]
fn monte_carlo_rate_matches_enumeration() {
    let mut r = rng(2);
    let a = random_spd(4, 0.5, &mut r);
    let ens = DiscreteSketchEnsemble::single_column_uniform(4);
    let exact_rho = rate_rho(&a, &ens).unwrap();

    let config = SketchConfig::new(SketchKind::Subsample, 1);
    let (mc_eh, _) = expected_projection_mc(&a, &config, 200_000, 9).unwrap();
    // Rate from the sampled expectation.
    let root = {
        let (values, vectors) = eig_sym(&a).unwrap();
        let n = a.rows();
        let mut out = DenseMatrix::zeros(n, n);
        for (idx, &lam) in values.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.set(
                        i,
                        j,
                        out.get(i, j) + lam.sqrt() * vectors.get(i, idx) * vectors.get(j, idx),
                    );
                }
            }
        }
        out
    };
    let mut conj = root.matmul(&mc_eh).matmul(&root);
    conj.symmetrize();
    let (values, _) = eig_sym(&conj).unwrap();
    let mc_rho = values.iter().copied().find(|&v| v > 1e-10).unwrap();
    assert!(
        (mc_rho - exact_rho).abs() <= 0.005 * exact_rho,
        "mc {mc_rho} vs exact {exact_rho}"
    );
}

/// Mean A-norm error over repeated runs decays no slower than the linear
/// rate certificate predicts.
#[test]
fn contraction_follows_the_certified_rate() {
    let mut r = rng(8);
    let a = random_spd(8, 1.0, &mut r);
    let b = random_vector(8, &mut r);
    let problem = RidgeProblem::from_system(Matrix::Dense(a.clone()), b).unwrap();
    let w_star = solve_direct(&problem).unwrap();
    let init = a_norm_sq(problem.a(), &w_star);

    let rho = rate_rho(&a, &DiscreteSketchEnsemble::single_column_uniform(8)).unwrap();
    let t = 40;
    let runs = 100;
    let mut mean_err = 0.0;
    for run in 0..runs {
        let mut config = SolverConfig::new(SketchConfig::new(SketchKind::Subsample, 1));
        config.tolerance = 1e-300;
        config.max_iter = t;
        config.seed = 1000 + run;
        let report = solve_sketch_project(&problem, &config).unwrap();
        mean_err += a_norm_sq(problem.a(), &sub(&report.solution, &w_star));
    }
    mean_err /= runs as f64;
    let bound = (1.0 - rho).powi(t as i32) * init;
    assert!(
        mean_err <= 1.15 * bound,
        "mean error {mean_err:e} above rate bound {bound:e}"
    );
}

/// Average-iterate residual bound for damped steps (γ < 1): the averaged
/// iterate satisfies ‖A w̄ − b‖² ≤ init / (λ_min(E[H]) · 2 t γ(1−γ)) in the
/// mean.
#[test]
fn damped_steps_bound_the_averaged_iterate() {
    let mut r = rng(23);
    let a = random_spd(8, 1.0, &mut r);
    let b = random_vector(8, &mut r);
    let problem = RidgeProblem::from_system(Matrix::Dense(a.clone()), b).unwrap();
    let w_star = solve_direct(&problem).unwrap();
    let init = a_norm_sq(problem.a(), &w_star);

    let ens = DiscreteSketchEnsemble::single_column_uniform(8);
    let eh = expected_projection(&a, &ens).unwrap();
    let (eh_values, _) = eig_sym(&eh).unwrap();
    let lambda_min_eh = eh_values[0];
    assert!(lambda_min_eh > 0.0);

    let gamma = 0.5;
    let t = 60;
    let runs = 100;
    let mut mean_res_sq = 0.0;
    for run in 0..runs {
        let mut config = SolverConfig::new(SketchConfig::new(SketchKind::Subsample, 1));
        config.tolerance = 1e-300;
        config.max_iter = t;
        config.step_size = gamma;
        config.seed = 40_000 + run;
        config.record_iterates = true;
        let report = solve_sketch_project(&problem, &config).unwrap();
        let iterates = report.iterates.unwrap();
        let mut averaged = vec![0.0; 8];
        for w in &iterates {
            for (acc, v) in averaged.iter_mut().zip(w) {
                *acc += v;
            }
        }
        for acc in &mut averaged {
            *acc /= iterates.len() as f64;
        }
        let res = problem.residual(&averaged);
        mean_res_sq += res.iter().map(|v| v * v).sum::<f64>();
    }
    mean_res_sq /= runs as f64;
    let bound = init / (lambda_min_eh * 2.0 * t as f64 * gamma * (1.0 - gamma));
    assert!(
        mean_res_sq <= bound,
        "averaged residual {mean_res_sq:e} above bound {bound:e}"
    );
}

/// Last-iterate residual bound under the constant-η momentum mapping, at a
/// scale small enough for quick feedback.
#[test]
fn momentum_last_iterate_bound_small_scale() {
    let mut r = rng(31);
    let a = random_spd(8, 1.0, &mut r);
    let b = random_vector(8, &mut r);
    let problem = RidgeProblem::from_system(Matrix::Dense(a.clone()), b).unwrap();
    let w_star = solve_direct(&problem).unwrap();
    let init = a_norm_sq(problem.a(), &w_star);
    let trace = a.trace();

    let eta = 0.5;
    let k = 80;
    let runs = 100;
    let mut mean = 0.0;
    for run in 0..runs {
        let mut config = SolverConfig::new(SketchConfig::new(SketchKind::Subsample, 1));
        config.tolerance = 1e-300;
        config.max_iter = k;
        config.seed = 90_000 + run;
        let report = skridge::solve_cd_momentum(
            &problem,
            &config,
            &MomentumSchedule::TheoreticalConstant { eta },
        )
        .unwrap();
        let res = problem.residual(&report.solution);
        mean += res.iter().map(|v| v * v).sum::<f64>();
    }
    mean /= runs as f64;
    // λ_min(E[H]) = 1/trace(A) under diagonal-proportional sampling.
    let bound = momentum_bound_general(&vec![eta; k], init, 1.0 / trace).unwrap();
    assert!(mean <= bound, "mean {mean:e} above bound {bound:e}");
}

/// Dual-route weights match the primal solution.
#[test]
fn primal_and_dual_solve_the_same_regression() {
    let mut r = rng(77);
    for (n, d, lambda) in [(5usize, 3usize, 0.1), (4, 7, 1.0), (8, 8, 0.5)] {
        let x = DenseMatrix::from_fn(n, d, |_, _| {
            use rand::Rng;
            r.random::<f64>() - 0.5
        });
        let y = random_vector(n, &mut r);
        let primal = build_primal(Matrix::Dense(x.clone()), &y, lambda).unwrap();
        let dual = build_dual(Matrix::Dense(x), &y, lambda).unwrap();
        let w_primal = solve_direct(&primal).unwrap();
        let alpha = solve_direct(&dual).unwrap();
        let w_dual = recover_weights(&dual, &alpha).unwrap();
        assert!(common::max_abs_diff(&w_primal, &w_dual) <= 1e-8);
    }
}

/// An unregularized kernel system is K², positive semidefinite.
#[test]
fn kernel_without_ridge_is_psd() {
    let mut r = rng(13);
    let x = DenseMatrix::from_fn(5, 2, |_, _| {
        use rand::Rng;
        r.random::<f64>()
    });
    let p = build_kernel(Matrix::Dense(x), &[1.0, -1.0, 0.5, 0.0, 2.0], 0.0, 0.8).unwrap();
    let (values, _) = eig_sym(&p.a().to_dense()).unwrap();
    let scale = values.last().unwrap().abs().max(1.0);
    assert!(values[0] >= -1e-12 * scale);
}
