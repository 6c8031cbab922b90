//! Step-size and momentum schedules.
//!
//! The momentum update carries a step size γ_k and a momentum weight β_k.
//! Besides the fixed settings, both can be generated from an averaging
//! parametrization (η_k, ζ_k) through
//!
//! ```text
//! ζ_0 = 0,  ζ_k = (1/η_k) Σ_{t<k} η_t(1−η_t),
//! γ_k = η_k / (ζ_{k+1} + 1),  β_k = ζ_k / (ζ_{k+1} + 1).
//! ```

use crate::error::{Error, Result};

/// η in the increasing schedule before β reaches one half.
pub const INCREASING_ETA: f64 = 0.995;

/// Momentum parameter family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumSchedule {
    /// γ = 1, β = 0: plain sketch-and-project.
    None,
    /// γ = 1, β = 0.5 at every step.
    Constant,
    /// The averaging parametrization with a constant η in (0, 1).
    TheoreticalConstant { eta: f64 },
    /// η = 0.995 until β (of the previous step) reaches 0.5, then η = 1.
    /// β grows from 0 towards 0.5 while γ decays from 1 towards 0.5.
    TheoreticalIncreasing,
    /// γ = 1 with β_k = 1 − (2−η) / ((k+1)(1−η) + 1); β starts at zero and
    /// grows. Robust default in practice.
    Heuristic { eta: f64 },
}

impl MomentumSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            MomentumSchedule::TheoreticalConstant { eta } | MomentumSchedule::Heuristic { eta } => {
                if !(*eta > 0.0 && *eta < 1.0) {
                    return Err(Error::invalid(format!(
                        "momentum schedule requires eta in (0, 1), got {eta}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn state(&self) -> ScheduleState {
        let inner = match *self {
            MomentumSchedule::None => Inner::Fixed {
                gamma: 1.0,
                beta: 0.0,
            },
            MomentumSchedule::Constant => Inner::Fixed {
                gamma: 1.0,
                beta: 0.5,
            },
            MomentumSchedule::TheoreticalConstant { eta } => {
                Inner::Eta(EtaState::new(EtaSchedule::Constant(eta)))
            }
            MomentumSchedule::TheoreticalIncreasing => {
                Inner::Eta(EtaState::new(EtaSchedule::SwitchingIncreasing))
            }
            MomentumSchedule::Heuristic { eta } => Inner::Heuristic { eta, k: 0 },
        };
        ScheduleState { inner }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MomentumSchedule::None => "none",
            MomentumSchedule::Constant => "constant",
            MomentumSchedule::TheoreticalConstant { .. } => "theoretical",
            MomentumSchedule::TheoreticalIncreasing => "increasing",
            MomentumSchedule::Heuristic { .. } => "heuristic",
        }
    }
}

/// Stateful (γ_k, β_k) generator. Calls yield k = 0, 1, 2, ...
#[derive(Debug, Clone)]
pub struct ScheduleState {
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Fixed { gamma: f64, beta: f64 },
    Heuristic { eta: f64, k: usize },
    Eta(EtaState),
}

impl ScheduleState {
    /// Parameters of the next iteration.
    pub fn next_params(&mut self) -> (f64, f64) {
        match &mut self.inner {
            Inner::Fixed { gamma, beta } => (*gamma, *beta),
            Inner::Heuristic { eta, k } => {
                let beta = 1.0 - (2.0 - *eta) / ((*k as f64 + 1.0) * (1.0 - *eta) + 1.0);
                *k += 1;
                (1.0, beta)
            }
            Inner::Eta(state) => {
                let step = state.next_step();
                (step.gamma, step.beta)
            }
        }
    }
}

/// (γ_k, β_k) at a given iteration index, replaying the schedule from the
/// start. Convenient for inspection; solvers keep their own state.
pub fn schedule_step(schedule: &MomentumSchedule, k: usize) -> (f64, f64) {
    let mut state = schedule.state();
    let mut out = state.next_params();
    for _ in 0..k {
        out = state.next_params();
    }
    out
}

/// η_k generator for the averaging form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSchedule {
    /// η_k ≡ η with η in (0, 1]. η = 1 collapses to plain sketch-and-project.
    Constant(f64),
    /// η_k = 0.995 until the previous β reached 0.5, then η_k = 1.
    SwitchingIncreasing,
}

impl EtaSchedule {
    pub fn validate(&self) -> Result<()> {
        if let EtaSchedule::Constant(eta) = self {
            if !(*eta > 0.0 && *eta <= 1.0) {
                return Err(Error::invalid(format!(
                    "eta schedule requires eta in (0, 1], got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// One step of the averaging parametrization.
#[derive(Debug, Clone, Copy)]
pub struct EtaStep {
    pub eta: f64,
    pub zeta: f64,
    pub zeta_next: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Running state of the (η, ζ) recursion.
#[derive(Debug, Clone)]
pub struct EtaState {
    schedule: EtaSchedule,
    /// Σ_{t<k} η_t (1 − η_t).
    sum: f64,
    last_beta: f64,
}

impl EtaState {
    pub fn new(schedule: EtaSchedule) -> Self {
        Self {
            schedule,
            sum: 0.0,
            last_beta: 0.0,
        }
    }

    pub fn next_step(&mut self) -> EtaStep {
        let eta = match self.schedule {
            EtaSchedule::Constant(eta) => eta,
            EtaSchedule::SwitchingIncreasing => {
                if self.last_beta < 0.5 {
                    INCREASING_ETA
                } else {
                    1.0
                }
            }
        };
        let zeta = self.sum / eta;
        self.sum += eta * (1.0 - eta);
        let zeta_next = self.sum / eta;
        let gamma = eta / (zeta_next + 1.0);
        let beta = zeta / (zeta_next + 1.0);
        self.last_beta = beta;
        EtaStep {
            eta,
            zeta,
            zeta_next,
            gamma,
            beta,
        }
    }
}
