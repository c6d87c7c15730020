//! Manufactured solutions: exact fields with the matching source term.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::{ProblemSpec, SolverError, Source};
use crate::constitutive::{ForchheimerLaw, Inverter, RotationSpec, ToleranceSpec};
use crate::field_grid::{ConstantField, EnvironmentParams, Forcing, Grid, ScalarField, SpaceTimeField};

pub const CASES: [&str; 3] = ["mms-quadratic", "mms-trig", "steady-const"];

/// `1 + A x1 (1 − x1) t`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticInTime {
    pub amplitude: f64,
}

impl SpaceTimeField for QuadraticInTime {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        1.0 + self.amplitude * x.x * (1.0 - x.x) * t
    }
    fn gradient(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
        Vector3::new(self.amplitude * (1.0 - 2.0 * x.x) * t, 0.0, 0.0)
    }
    fn time_derivative(&self, x: &Vector3<f64>, _: f64) -> f64 {
        self.amplitude * x.x * (1.0 - x.x)
    }
    fn hessian(&self, _: &Vector3<f64>, t: f64) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        h[(0, 0)] = -2.0 * self.amplitude * t;
        h
    }
}

/// `1 + A sin(π x1) sin(π x2) e^{−t}`.
#[derive(Debug, Clone, Copy)]
pub struct DecayingTrig {
    pub amplitude: f64,
}

impl SpaceTimeField for DecayingTrig {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        1.0 + self.amplitude * (PI * x.x).sin() * (PI * x.y).sin() * (-t).exp()
    }
    fn gradient(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let (s1, c1) = (PI * x.x).sin_cos();
        let (s2, c2) = (PI * x.y).sin_cos();
        Vector3::new(PI * c1 * s2, PI * s1 * c2, 0.0) * (self.amplitude * (-t).exp())
    }
    fn time_derivative(&self, x: &Vector3<f64>, t: f64) -> f64 {
        -self.amplitude * (PI * x.x).sin() * (PI * x.y).sin() * (-t).exp()
    }
    fn hessian(&self, x: &Vector3<f64>, t: f64) -> Matrix3<f64> {
        let (s1, c1) = (PI * x.x).sin_cos();
        let (s2, c2) = (PI * x.y).sin_cos();
        let a = self.amplitude * (-t).exp() * PI * PI;
        let mut h = Matrix3::zeros();
        h[(0, 0)] = -a * s1 * s2;
        h[(1, 1)] = -a * s1 * s2;
        h[(0, 1)] = a * c1 * c2;
        h[(1, 0)] = a * c1 * c2;
        h
    }
}

/// `f = φ u_t − div X(∇u + u² Z)` for an exact field `u`, with
/// `div X(Φ) = X'(Φ) : (DΦ)ᵀ`.
pub struct ManufacturedSource {
    exact: Arc<dyn SpaceTimeField>,
    env: EnvironmentParams,
    law: ForchheimerLaw,
    forcing: Forcing,
}

impl ManufacturedSource {
    pub fn new(exact: Arc<dyn SpaceTimeField>, env: EnvironmentParams, law: ForchheimerLaw) -> Self {
        Self { exact, forcing: env.forcing(), env, law }
    }

    /// `Φ` and its Jacobian `(DΦ)_{ij} = ∂_j Φ_i` at `(x, t)`.
    pub fn phi_and_jacobian(&self, x: &Vector3<f64>, t: f64) -> (Vector3<f64>, Matrix3<f64>) {
        let u = self.exact.value(x, t);
        let g = self.exact.gradient(x, t);
        let z = self.forcing.eval(x, t);
        let phi = g + z * (u * u);
        let dphi = self.exact.hessian(x, t) + (z * g.transpose()) * (2.0 * u) + self.forcing.jacobian() * (u * u);
        (phi, dphi)
    }
}

impl Source for ManufacturedSource {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        let (phi, dphi) = self.phi_and_jacobian(x, t);
        let inverter = Inverter::new(&self.law, &self.env.rot, ToleranceSpec::default());
        let xp = inverter
            .jacobian_inverse(&phi)
            .expect("kernel inversion converges for every finite argument");
        let div = xp.component_mul(&dphi.transpose()).sum();
        self.env.phi * self.exact.time_derivative(x, t) - div
    }
}

pub struct ManufacturedCase {
    pub spec: ProblemSpec,
    pub exact: Arc<dyn SpaceTimeField>,
}

impl ManufacturedCase {
    /// `u_ex(·, t)` sampled at cell centers.
    pub fn exact_at(&self, t: f64) -> ScalarField {
        ScalarField::from_fn(&self.spec.grid, |x| self.exact.value(x, t))
    }
}

fn forced_env() -> Result<EnvironmentParams, SolverError> {
    let rot = RotationSpec::vertical(0.5)?;
    Ok(EnvironmentParams::new(1.0, 0.5, 1.0, 0.3, 0.2, rot)?)
}

/// Builds a catalogued manufactured case on the unit cube with `n` cells per
/// axis and final time `t_final`.
pub fn manufactured_case(id: &str, n: usize, t_final: f64) -> Result<ManufacturedCase, SolverError> {
    let grid = Grid::unit_cube(n)?;
    let law = ForchheimerLaw::two_term(1.0, 1.0)?;
    let (env, exact): (EnvironmentParams, Arc<dyn SpaceTimeField>) = match id {
        "mms-quadratic" => (forced_env()?, Arc::new(QuadraticInTime { amplitude: 0.1 })),
        "mms-trig" => (forced_env()?, Arc::new(DecayingTrig { amplitude: 0.1 })),
        "steady-const" => (EnvironmentParams::quiescent(1.0, 1.0)?, Arc::new(ConstantField(1.0))),
        other => return Err(SolverError::UnknownCase(other.to_string())),
    };
    let source = ManufacturedSource::new(exact.clone(), env, law.clone());
    let u0 = ScalarField::from_fn(&grid, |x| exact.value(x, 0.0));
    let spec = ProblemSpec {
        env,
        law,
        grid,
        u0,
        psi: exact.clone(),
        t_final,
        source: Some(Arc::new(source)),
    };
    Ok(ManufacturedCase { spec, exact })
}
