use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{FieldError, Grid};
use crate::constitutive::RotationSpec;

/// Dimensional parameters before scaling by the compressibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub kappa: f64,
    pub phi_tilde: f64,
    pub g_tilde: f64,
    pub omega_tilde: f64,
    pub rho_star: f64,
    pub theta: f64,
    pub omega0: f64,
    pub axis: [f64; 3],
}

/// Nondimensional parameters of the forcing `Z(x,t) = -G e0(t) + Ω² J² x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    pub phi: f64,
    pub gravity: f64,
    pub omega: f64,
    pub theta: f64,
    pub omega0: f64,
    pub rot: RotationSpec,
    /// When false the gravity term is dropped from `Z`; `gravity` still
    /// enters the derived bounds.
    pub gravity_enabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedEnvBounds {
    pub r0: f64,
    pub omega_star: f64,
    pub d_star: f64,
    pub chi_star: f64,
    pub m_z: f64,
    pub mu_z: f64,
    pub rho_star: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), FieldError> {
        let bad = |m: &str| Err(FieldError::InvalidParams(m.to_string()));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa must be positive");
        }
        if !(self.phi_tilde > 0.0 && self.phi_tilde < 1.0) {
            return bad("phi_tilde must lie in (0, 1)");
        }
        if !(self.g_tilde > 0.0 && self.g_tilde.is_finite()) {
            return bad("G_tilde must be positive");
        }
        if !(self.omega_tilde >= 0.0 && self.omega_tilde.is_finite()) {
            return bad("Omega_tilde must be nonnegative");
        }
        if !(self.rho_star >= 0.0 && self.rho_star.is_finite()) {
            return bad("rho_star must be nonnegative");
        }
        if !(0.0..=PI).contains(&self.theta) {
            return bad("theta must lie in [0, pi]");
        }
        if !self.omega0.is_finite() {
            return bad("omega0 must be finite");
        }
        Ok(())
    }
}

/// `φ = κφ̃`, `G = κ²G̃`, `Ω = κΩ̃` and `R = 2ρ*Ω/φ`.
pub fn nondimensionalize(p: &PhysicalParams) -> Result<EnvironmentParams, FieldError> {
    p.validate()?;
    let phi = p.kappa * p.phi_tilde;
    let omega = p.kappa * p.omega_tilde;
    let coriolis = 2.0 * p.rho_star * omega / phi;
    let rot = RotationSpec::from_direction(p.axis, coriolis)?;
    EnvironmentParams::new(phi, p.kappa * p.kappa * p.g_tilde, omega, p.theta, p.omega0, rot)
}

impl EnvironmentParams {
    pub fn new(
        phi: f64,
        gravity: f64,
        omega: f64,
        theta: f64,
        omega0: f64,
        rot: RotationSpec,
    ) -> Result<Self, FieldError> {
        let env = Self { phi, gravity, omega, theta, omega0, rot, gravity_enabled: true };
        env.validate()?;
        Ok(env)
    }

    /// Environment with `Z ≡ 0`: no rotation and gravity disabled.
    pub fn quiescent(phi: f64, gravity: f64) -> Result<Self, FieldError> {
        let mut env = Self::new(phi, gravity, 0.0, 0.0, 0.0, RotationSpec::vertical(0.0)?)?;
        env.gravity_enabled = false;
        Ok(env)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let bad = |m: &str| Err(FieldError::InvalidParams(m.to_string()));
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return bad("phi must be positive");
        }
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return bad("G must be positive");
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad("Omega must be nonnegative");
        }
        if !(0.0..=PI).contains(&self.theta) {
            return bad("theta must lie in [0, pi]");
        }
        if !self.omega0.is_finite() {
            return bad("omega0 must be finite");
        }
        if self.omega == 0.0 && self.rot.coriolis() > 0.0 {
            return bad("a positive Coriolis coefficient requires Omega > 0");
        }
        Ok(())
    }

    /// `ρ*` recovered from `R = 2ρ*Ω/φ`; zero without rotation.
    pub fn rho_star(&self) -> f64 {
        if self.omega > 0.0 {
            self.rot.coriolis() * self.phi / (2.0 * self.omega)
        } else {
            0.0
        }
    }

    pub fn forcing(&self) -> Forcing {
        let (_, j2) = self.rot.matrices();
        Forcing { env: *self, centrifugal: j2 * (self.omega * self.omega) }
    }
}

/// `e0(t) = (-sinθ cos(Ωt+ω0), -sinθ sin(Ωt+ω0), cosθ)`.
pub fn eval_e0(env: &EnvironmentParams, t: f64) -> Vector3<f64> {
    let (st, ct) = env.theta.sin_cos();
    let (sp, cp) = (env.omega * t + env.omega0).sin_cos();
    Vector3::new(-st * cp, -st * sp, ct)
}

pub fn eval_z(env: &EnvironmentParams, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
    env.forcing().at_time(t).eval(x)
}

/// `Z` with `Ω² J²` cached.
#[derive(Debug, Clone, Copy)]
pub struct Forcing {
    env: EnvironmentParams,
    centrifugal: Matrix3<f64>,
}

/// `Z(·, t) = c + M x` for one fixed time.
#[derive(Debug, Clone, Copy)]
pub struct ForcingSlice {
    pub offset: Vector3<f64>,
    pub matrix: Matrix3<f64>,
}

impl Forcing {
    pub fn at_time(&self, t: f64) -> ForcingSlice {
        let offset = if self.env.gravity_enabled { eval_e0(&self.env, t) * -self.env.gravity } else { Vector3::zeros() };
        ForcingSlice { offset, matrix: self.centrifugal }
    }

    pub fn eval(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
        self.at_time(t).eval(x)
    }

    /// `DZ = Ω² J²`, independent of `(x,t)`.
    pub fn jacobian(&self) -> Matrix3<f64> {
        self.centrifugal
    }

    /// `|DZ|`, exactly `√2 Ω²`.
    pub fn jacobian_norm(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.env.omega * self.env.omega
    }
}

impl ForcingSlice {
    #[inline]
    pub fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.offset + self.matrix * x
    }
}

/// Largest `|x|` over the closed box; only the planar part counts for a
/// vertical rotation axis.
pub fn box_radius(grid: &Grid, rot: &RotationSpec) -> f64 {
    grid.corners()
        .iter()
        .map(|c| if rot.is_vertical() { c.x.hypot(c.y) } else { c.norm() })
        .fold(0.0, f64::max)
}

pub fn env_bounds(env: &EnvironmentParams, grid: &Grid) -> Result<DerivedEnvBounds, FieldError> {
    if !(env.gravity > 0.0) {
        return Err(FieldError::ZeroGravity);
    }
    let r0 = box_radius(grid, &env.rot);
    if !(r0 > 0.0) {
        return Err(FieldError::InvalidParams("box radius r0 must be positive".into()));
    }
    let rho_star = env.rho_star();
    let omega_star = env.omega * (r0 / env.gravity).sqrt();
    let d_star = (env.gravity / r0).sqrt() * (2.0 * rho_star / env.phi).max(r0.sqrt()).max(2f64.powf(0.25));
    let chi_star = d_star * (1.0 + omega_star);
    Ok(DerivedEnvBounds {
        r0,
        omega_star,
        d_star,
        chi_star: chi_star.max(1.0),
        m_z: env.gravity + env.omega * env.omega * r0,
        mu_z: std::f64::consts::SQRT_2 * env.omega * env.omega,
        rho_star,
    })
}
