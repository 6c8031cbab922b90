//! Cross-implementation equivalences: the heavy-ball and averaging forms
//! generate the same iterates, coordinate descent is the τ = 1 special
//! case, and unit acceleration parameters collapse to the plain method.

mod common;

use common::{max_abs_diff, random_spd_problem, rng};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skridge::linalg::least_norm_solution;
use skridge::{
    coordinate_sampler, solve_accelerated, solve_cd_momentum, solve_momentum,
    solve_momentum_averaging_form, solve_sketch_project, AccelParams, DenseMatrix, EtaSchedule,
    Matrix, MomentumSchedule, RidgeProblem, SketchConfig, SketchKind, SolverConfig,
};

fn tracing_config(kind: SketchKind, tau: usize, iters: usize, seed: u64) -> SolverConfig {
    let mut c = SolverConfig::new(SketchConfig::new(kind, tau));
    c.tolerance = 1e-300;
    c.max_iter = iters;
    c.seed = seed;
    c.record_iterates = true;
    c
}

/// Heavy-ball and averaging parametrizations agree iterate by iterate, for
/// constant η and for the switching schedule.
#[test]
fn heavy_ball_equals_averaging_form() {
    let problem = random_spd_problem(10, 0.5, 101);
    let cases: Vec<(MomentumSchedule, EtaSchedule)> = vec![
        (
            MomentumSchedule::TheoreticalConstant { eta: 0.3 },
            EtaSchedule::Constant(0.3),
        ),
        (
            MomentumSchedule::TheoreticalConstant { eta: 0.5 },
            EtaSchedule::Constant(0.5),
        ),
        (
            MomentumSchedule::TheoreticalConstant { eta: 0.9 },
            EtaSchedule::Constant(0.9),
        ),
        (
            MomentumSchedule::TheoreticalIncreasing,
            EtaSchedule::SwitchingIncreasing,
        ),
    ];
    for (heavy, avg) in cases {
        let config = tracing_config(SketchKind::Subsample, 3, 100, 2024);
        let hb = solve_momentum(&problem, &config, &heavy).unwrap();
        let av = solve_momentum_averaging_form(&problem, &config, avg).unwrap();
        let hb_iterates = hb.iterates.unwrap();
        let av_iterates = av.iterates.unwrap();
        assert_eq!(hb_iterates.len(), av_iterates.len());
        for (k, (x, y)) in hb_iterates.iter().zip(&av_iterates).enumerate() {
            let diff = max_abs_diff(x, y);
            assert!(diff <= 1e-10, "{heavy:?} diverges from averaging at k={k}: {diff:e}");
        }
    }
}

/// η ≡ 1 in the averaging form is plain sketch-and-project.
#[test]
fn eta_one_averaging_is_plain_sketch_project() {
    let problem = random_spd_problem(10, 0.5, 7);
    let config = tracing_config(SketchKind::Count, 3, 50, 5);
    let plain = solve_sketch_project(&problem, &config).unwrap();
    let avg = solve_momentum_averaging_form(&problem, &config, EtaSchedule::Constant(1.0)).unwrap();
    for (x, y) in plain
        .iterates
        .unwrap()
        .iter()
        .zip(avg.iterates.unwrap().iter())
    {
        assert!(max_abs_diff(x, y) <= 1e-12);
    }
}

/// The specialized CD loop equals general momentum with explicit e_i
/// sketches driven by the same coordinate draws.
#[test]
fn cd_momentum_matches_general_arithmetic() {
    let problem = random_spd_problem(9, 0.8, 51);
    let a = problem.a();
    let m = problem.dim();
    let iters = 120;
    for schedule in [
        MomentumSchedule::None,
        MomentumSchedule::Constant,
        MomentumSchedule::Heuristic { eta: 0.5 },
    ] {
        let config = tracing_config(SketchKind::Subsample, 1, iters, 77);
        let fast = solve_cd_momentum(&problem, &config, &schedule).unwrap();
        let fast_iterates = fast.iterates.unwrap();

        // Reference: textbook sketch-and-project arithmetic with S = e_i,
        // sampling coordinates from the same distribution and stream.
        let sampler = coordinate_sampler(a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut sched = schedule.state();
        let mut w = vec![0.0; m];
        let mut w_prev = w.clone();
        let mut r: Vec<f64> = problem.b().iter().map(|v| -v).collect();
        let mut r_prev = r.clone();
        for k in 0..iters {
            let (gamma, beta) = sched.next_params();
            let i = sampler.sample(&mut rng);
            let sas = DenseMatrix::new(1, 1, vec![a.get(i, i)]).unwrap();
            let delta = least_norm_solution(&sas, &[r[i]]).unwrap()[0];
            let mut w_next = vec![0.0; m];
            let mut r_next = vec![0.0; m];
            for j in 0..m {
                w_next[j] = (1.0 + beta) * w[j] - beta * w_prev[j];
                r_next[j] = (1.0 + beta) * r[j] - beta * r_prev[j] - gamma * delta * a.get(j, i);
            }
            w_next[i] -= gamma * delta;
            w_prev = std::mem::replace(&mut w, w_next);
            r_prev = std::mem::replace(&mut r, r_next);
            let diff = max_abs_diff(&w, &fast_iterates[k + 1]);
            assert!(diff <= 1e-12, "{schedule:?} k={k} diff={diff:e}");
        }
    }
}

/// μ = ν = 1 turns acceleration off exactly.
#[test]
fn unit_acceleration_parameters_reduce_to_plain() {
    let problem = random_spd_problem(12, 1.0, 61);
    for kind in [SketchKind::Subsample, SketchKind::Gaussian] {
        let config = tracing_config(kind, 3, 80, 9);
        let plain = solve_sketch_project(&problem, &config).unwrap();
        let accel =
            solve_accelerated(&problem, &config, AccelParams::new(1.0, 1.0).unwrap()).unwrap();
        for (x, y) in plain
            .residual_trace
            .iter()
            .zip(&accel.residual_trace)
        {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{kind}");
        }
        for (x, y) in plain
            .iterates
            .unwrap()
            .iter()
            .zip(accel.iterates.unwrap().iter())
        {
            assert!(max_abs_diff(x, y) <= 1e-12, "{kind}");
        }
    }
}

/// The three maintained residuals of the accelerated recursion stay glued
/// to the recomputed one for the reported iterate.
#[test]
fn accelerated_maintained_residual_is_faithful() {
    let problem = random_spd_problem(50, 1.0, 71);
    let scale = skridge::linalg::norm2(problem.b());
    // Single-row sampling parameters from the spectral closed forms.
    let dense = problem.a().to_dense();
    let (values, _) = skridge::linalg::eig_sym(&dense).unwrap();
    let trace = dense.trace();
    let min_diag = (0..50).map(|i| dense.get(i, i)).fold(f64::INFINITY, f64::min);
    let accel = AccelParams::new(values[0] / trace, trace / min_diag).unwrap();
    for iters in [10usize, 40, 100] {
        let config = tracing_config(SketchKind::Subsample, 1, iters, 3);
        let report = solve_accelerated(&problem, &config, accel).unwrap();
        let fresh = problem.residual(&report.solution);
        let drift = max_abs_diff(&report.final_residual, &fresh);
        assert!(drift <= 1e-8 * scale, "iters={iters} drift={drift:e}");
    }
}

/// Exact single-row parameters keep the accelerated method convergent on a
/// diagonally dominant system.
#[test]
fn accelerated_single_row_smoke_convergence() {
    let mut a = DenseMatrix::zeros(10, 10);
    let mut r = rng(15);
    for i in 0..10 {
        for j in 0..10 {
            if i != j {
                use rand::Rng;
                a.set(i, j, 0.05 * r.random::<f64>());
            }
        }
    }
    for i in 0..10 {
        a.set(i, i, 1.0 + i as f64 * 0.3);
    }
    a.symmetrize();
    let b: Vec<f64> = (0..10).map(|i| (i as f64 * 0.77).sin()).collect();
    let problem = RidgeProblem::from_system(Matrix::Dense(a.clone()), b).unwrap();

    let (values, _) = skridge::linalg::eig_sym(&a).unwrap();
    let trace = a.trace();
    let min_diag = (0..10).map(|i| a.get(i, i)).fold(f64::INFINITY, f64::min);
    let accel = AccelParams::new(values[0] / trace, trace / min_diag).unwrap();

    let mut config = SolverConfig::new(SketchConfig::new(SketchKind::Subsample, 1));
    config.tolerance = 1e-4;
    config.max_iter = 10_000;
    config.seed = 12;
    let report = solve_accelerated(&problem, &config, accel).unwrap();
    assert!(report.converged, "stopped at {}", report.iterations);
}
