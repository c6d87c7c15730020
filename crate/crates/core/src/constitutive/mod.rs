//! The constitutive kernel: the function `g`, the momentum map `F`, its
//! inverse `X`, their Jacobians, the explicit kernel constants and samplers
//! that check the pointwise inequalities those constants enter.

mod bounds;
mod constants;
mod kernel;
mod law;
mod rotation;

pub use bounds::{
    verify_kernel_bounds, verify_kernel_bounds_with, BoundOptions, BoundReport, Inequality, Violation,
};
pub use constants::{kernel_constants, KernelConstants, C_STAR};
pub use kernel::{eval_f, invert_f, inverse3, jacobian_f, jacobian_x, Inversion, Inverter, ToleranceSpec};
pub use law::ForchheimerLaw;
pub use rotation::{rotation_matrices, RotationSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("g'(0) is unbounded for a law with smallest exponent below one")]
    SingularDerivative,
    #[error("invalid law: {0}")]
    InvalidLaw(String),
    #[error("invalid rotation: {0}")]
    InvalidRotation(String),
    #[error("Newton inversion did not converge: residual {residual:e} above target {target:e}")]
    NoConvergence { residual: f64, target: f64 },
    #[error("singular Jacobian of F")]
    SingularJacobian,
}
