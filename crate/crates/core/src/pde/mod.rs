//! Residual, analytic Jacobian, and damped-Newton continuation solver for the
//! graphical translator equation with capped infinite boundary data.

mod banded;
mod jacobian;
mod newton;
mod residual;
mod sparse;
mod unknowns;

pub use banded::{BandedLu, BandedMatrix};
pub use jacobian::{translator_jacobian, Linearization};
pub use newton::{resample, solve_bvp};
pub use residual::{translator_operator, translator_residual};
pub use sparse::{bicgstab, SparseMatrix};
pub use unknowns::{NodeRef, UnknownMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolverKind {
    BandedDirect,
    StabilizedIterative,
}

/// Seed for the first continuation stage when no explicit field is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitGuess {
    /// Discrete-harmonic extension of the first-stage capped boundary data.
    #[default]
    HarmonicLift,
    Zero,
}

/// Newton/continuation solver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub damping_factor: f64,
    pub min_step: f64,
    pub cap_schedule: Vec<f64>,
    pub linear_solver: LinearSolverKind,
    #[serde(default)]
    pub init_guess: InitGuess,
    #[serde(default)]
    pub continuation_in_x: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-10,
            max_newton_iters: 60,
            damping_factor: 0.5,
            min_step: (2.0f64).powi(-15),
            cap_schedule: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            linear_solver: LinearSolverKind::BandedDirect,
            init_guess: InitGuess::default(),
            continuation_in_x: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn with_caps(mut self, caps: &[f64]) -> Self {
        self.cap_schedule = caps.to_vec();
        self
    }

    pub fn final_cap(&self) -> f64 {
        *self.cap_schedule.last().expect("validated non-empty")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidDomain("newton_tol must be positive".into()));
        }
        if self.cap_schedule.is_empty() {
            return Err(Error::InvalidDomain("cap schedule must be non-empty".into()));
        }
        for pair in self.cap_schedule.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidDomain("cap schedule must be strictly increasing".into()));
            }
        }
        if self.cap_schedule[0] < 0.0 {
            return Err(Error::InvalidDomain("caps must be non-negative".into()));
        }
        if !(self.damping_factor > 0.0 && self.damping_factor < 1.0) {
            return Err(Error::InvalidDomain("damping factor must lie in (0,1)".into()));
        }
        if !(self.min_step > 0.0) {
            return Err(Error::InvalidDomain("min step must be positive".into()));
        }
        Ok(())
    }
}

/// Per-cap-stage convergence record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub cap: f64,
    pub newton_iters: usize,
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
}

/// Outcome of a continuation solve.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub final_residual: f64,
    pub stages: Vec<StageReport>,
    /// Core-window sup change between consecutive cap stages.
    pub stage_drifts: Vec<f64>,
    /// Last entry of `stage_drifts`: the drift between the final two caps.
    pub interior_drift: Option<f64>,
    pub failed_stage: Option<usize>,
}

impl SolveReport {
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            let stage = self.failed_stage.unwrap_or(self.stages.len().saturating_sub(1));
            let (cap, residual) = self
                .stages
                .get(stage)
                .map(|s| (s.cap, s.final_residual))
                .unwrap_or((f64::NAN, f64::NAN));
            Err(Error::NonConvergence { stage, cap, residual })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation_rejects_bad_schedules() {
        let mut c = SolverConfig::default();
        c.cap_schedule = vec![4.0, 4.0];
        assert!(c.validate().is_err());
        c.cap_schedule = vec![];
        assert!(c.validate().is_err());
        c.cap_schedule = vec![4.0, 8.0];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unconverged_report_raises_typed_error() {
        let report = SolveReport {
            converged: false,
            failed_stage: Some(1),
            stages: vec![
                StageReport { cap: 4.0, newton_iters: 3, final_residual: 1e-12, residual_history: vec![] },
                StageReport { cap: 6.0, newton_iters: 60, final_residual: 0.5, residual_history: vec![] },
            ],
            ..Default::default()
        };
        assert!(matches!(
            report.ensure_converged(),
            Err(Error::NonConvergence { stage: 1, .. })
        ));
    }
}
