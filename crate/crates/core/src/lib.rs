//! Randomized solvers for large-scale ridge and kernel ridge regression.
//!
//! The regression problem is reduced to a symmetric positive (semi)definite
//! linear system (`problem`), which is then solved by sketch-and-project
//! iterations (`solvers`) driven by pluggable random compression transforms
//! (`sketch`). Momentum and accelerated variants are included alongside
//! conjugate-gradient and direct baselines. The `theory` module computes
//! the convergence-rate quantities these methods are certified against at
//! small scale, and `linalg` holds the shared matrix containers and numeric
//! kernels.

pub mod error;
pub mod linalg;
pub mod problem;
pub mod sketch;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{CsrMatrix, DenseMatrix, Matrix};
pub use problem::{
    auto_select, build_dual, build_kernel, build_primal, predict_kernel, recover_weights,
    RidgeProblem, Route,
};
pub use sketch::{
    pad_to_power_of_two, subcount_params, SketchConfig, SketchKind, SketchOutcome, SketchState,
};
pub use solvers::{
    coordinate_sampler, schedule_step, solve_accelerated, solve_cd_momentum, solve_cg,
    solve_direct, solve_momentum, solve_momentum_averaging_form, solve_sketch_project,
    solve_sketch_project_from, AccelParams, CoordinateSampler, EtaSchedule, MomentumSchedule,
    SolveReport, SolverConfig,
};
pub use theory::{DiscreteSketchEnsemble, RateCertificate};
