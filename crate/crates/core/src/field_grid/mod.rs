//! Uniform Cartesian grids over a box, cell and face fields, the forcing
//! field `Z`, discrete differential operators and the degeneracy weight.

mod analytic;
mod env;
mod fields;
mod flux;
mod grid;
mod ops;
mod weight;

pub use analytic::{AffineField, ConstantField, SineProductField, SpaceTimeField};
pub use env::{
    box_radius, env_bounds, eval_e0, eval_z, nondimensionalize, DerivedEnvBounds, EnvironmentParams, Forcing,
    ForcingSlice, PhysicalParams,
};
pub use fields::{FaceField, ScalarField, VecField};
pub use flux::{
    assemble_face_phi, cell_momentum, cell_phi, flux, flux_with, recover_velocity, FaceFluxes, FluxWorkspace,
    VELOCITY_EPS,
};
pub use grid::{Grid, MIN_CELLS};
pub use ops::{divergence, face_gradient, gradient};
pub use weight::{kug_verify, weight_from_phi, weight_k};

#[cfg(test)]
pub(crate) use analytic::testing;

use thiserror::Error;

use crate::constitutive::KernelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("gravitational constant must be positive for the derived bounds")]
    ZeroGravity,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
