//! Explicit conservative integration of the initial-boundary value problem
//! and manufactured-solution cases.

mod convergence;
mod manufactured;
mod problem;
mod stepping;

pub use convergence::{l2_distance, spatial_study, temporal_study, ConvergenceRow, ConvergenceTable};
pub use manufactured::{manufactured_case, DecayingTrig, ManufacturedCase, ManufacturedSource, QuadraticInTime, CASES};
pub use problem::{boundary_values, BoundaryPreset, InitialPreset, ProblemSpec, Source};
pub use stepping::{balance_residual, run, shifted, stable_dt, Snapshot, StepControls, StepRecord, Stepper, Trajectory};

use thiserror::Error;

use crate::constitutive::KernelError;
use crate::field_grid::FieldError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid step controls: {0}")]
    InvalidControls(String),
    #[error("unknown manufactured case '{0}'")]
    UnknownCase(String),
    #[error("non-finite state after the step from t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("run failed: {source}")]
    RunFailed { source: Box<SolverError>, partial: Box<Trajectory> },
}

impl From<KernelError> for SolverError {
    fn from(e: KernelError) -> Self {
        SolverError::Field(FieldError::Kernel(e))
    }
}
