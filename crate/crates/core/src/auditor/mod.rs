//! Quadrature of the data functionals and the a-priori estimates on solver
//! trajectories, reported as ratios with unit constants.

mod cutoff;
mod energy;
mod estimates;
mod max_principle;
mod profile;
mod sweep;

pub use cutoff::{build_cutoff, Cutoff, TemporalRamp, SMOOTHSTEP_MAX_SLOPE};
pub use energy::{energy_quantities, EnergyQuantities, OrderValue, TimeValue};
pub use estimates::{
    default_s, estimate_audit, Auditor, EstimateParams, EstimateReport, ESTIMATES, MAX_SUP_CADENCE, SWEEP_ESTIMATES,
};
pub use max_principle::{max_principle_audit, MaxPrincipleReport};
pub use sweep::{sweep_environment, sweep_report, SweepPoint, SweepReport, SweepSummary};

use thiserror::Error;

use crate::constitutive::KernelError;
use crate::field_grid::FieldError;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown estimate '{0}'")]
    UnknownEstimate(String),
    #[error("estimate {id} needs s in {range}, got {s}")]
    Range { id: String, s: f64, range: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("run at omega_star = {omega_star} failed: {message}")]
    Run { omega_star: f64, message: String },
    #[error("sweep aborted: {source}")]
    SweepAborted { source: Box<AuditError>, partial: Box<SweepReport> },
}

impl From<KernelError> for AuditError {
    fn from(e: KernelError) -> Self {
        AuditError::Field(FieldError::Kernel(e))
    }
}

#[cfg(test)]
mod tests;
