use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::constitutive::ForchheimerLaw;
use crate::field_grid::{AffineField, ConstantField, EnvironmentParams, Grid, ScalarField, SineProductField, SpaceTimeField};

/// Additional right-hand side `f(x, t)`.
pub trait Source: Send + Sync {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64;
}

/// Initial-boundary value problem on a box.
#[derive(Clone)]
pub struct ProblemSpec {
    pub env: EnvironmentParams,
    pub law: ForchheimerLaw,
    pub grid: Grid,
    pub u0: ScalarField,
    /// Boundary data and its interior extension.
    pub psi: Arc<dyn SpaceTimeField>,
    pub t_final: f64,
    pub source: Option<Arc<dyn Source>>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("env", &self.env)
            .field("law", &self.law)
            .field("grid", &self.grid)
            .field("t_final", &self.t_final)
            .field("has_source", &self.source.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), SolverError> {
        self.env.validate()?;
        self.u0.matches(&self.grid)?;
        if !self.u0.is_finite() {
            return Err(SolverError::InvalidProblem("initial data must be finite".into()));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(SolverError::InvalidProblem(format!("final time must be >= 0, got {}", self.t_final)));
        }
        Ok(())
    }

    /// Whether `u0 >= 0` and `Ψ >= 0` on the boundary faces at `t`.
    pub fn data_nonnegative_at(&self, t: f64) -> bool {
        self.u0.min() >= 0.0 && boundary_values(&self.grid, self.psi.as_ref(), t).iter().all(|&v| v >= 0.0)
    }
}

/// `Ψ(·, t)` at every boundary face center.
pub fn boundary_values(grid: &Grid, psi: &dyn SpaceTimeField, t: f64) -> Vec<f64> {
    let n = grid.n();
    let mut out = Vec::new();
    for d in 0..3 {
        let mut m = n;
        m[d] += 1;
        for k in 0..m[2] {
            for j in 0..m[1] {
                for i in 0..m[0] {
                    let pos = [i, j, k][d];
                    if pos == 0 || pos == n[d] {
                        out.push(psi.value(&grid.face_center(d, i, j, k), t));
                    }
                }
            }
        }
    }
    out
}

/// Named initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialPreset {
    /// `level`.
    Constant { level: f64 },
    /// `level + amplitude Π_d sin(π (x_d − lo_d)/L_d)`.
    Bump { level: f64, amplitude: f64 },
    /// `level + amplitude (x1 − lo1)/L1`.
    Ramp { level: f64, amplitude: f64 },
    /// `level + amplitude · m(x)` with `m` a normalized sum of `modes` random
    /// low-frequency sine products drawn from `seed`.
    RandomModes { level: f64, amplitude: f64, modes: usize },
}

/// Named boundary data `Ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundaryPreset {
    Constant { level: f64 },
    /// `level + slope·x + rate t`.
    Affine { level: f64, slope: [f64; 3], rate: f64 },
    /// `level + amplitude sin(π (x1 − lo1)/L1) (1 + rate t)`.
    Wave { level: f64, amplitude: f64, rate: f64 },
}

impl InitialPreset {
    pub fn build(&self, grid: &Grid, seed: u64) -> ScalarField {
        let lo = grid.lo();
        let hi = grid.hi();
        let len = [0, 1, 2].map(|d| hi[d] - lo[d]);
        match *self {
            Self::Constant { level } => ScalarField::constant(grid, level),
            Self::Bump { level, amplitude } => {
                let f = SineProductField { constant: level, amplitude, lo, len, active: [true; 3], rate: 0.0 };
                ScalarField::from_fn(grid, |x| f.value(x, 0.0))
            }
            Self::Ramp { level, amplitude } => {
                ScalarField::from_fn(grid, |x| level + amplitude * (x.x - lo[0]) / len[0])
            }
            Self::RandomModes { level, amplitude, modes } => {
                let m = random_modes(seed, modes.max(1));
                ScalarField::from_fn(grid, |x| {
                    let r = [0, 1, 2].map(|d| (x[d] - lo[d]) / len[d]);
                    level + amplitude * m.eval(r)
                })
            }
        }
    }
}

struct RandomModes {
    terms: Vec<(f64, [f64; 3])>,
}

fn random_modes(seed: u64, count: usize) -> RandomModes {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(count);
    let mut total = 0.0;
    for _ in 0..count {
        let c: f64 = rng.random_range(-1.0..1.0);
        let freq = [0, 1, 2].map(|_| rng.random_range(1..=3) as f64);
        total += c.abs();
        terms.push((c, freq));
    }
    for t in &mut terms {
        t.0 /= total.max(f64::MIN_POSITIVE);
    }
    RandomModes { terms }
}

impl RandomModes {
    /// Value at unit-cube coordinates `r`; bounded by one in magnitude.
    fn eval(&self, r: [f64; 3]) -> f64 {
        use std::f64::consts::PI;
        self.terms
            .iter()
            .map(|(c, f)| c * (PI * f[0] * r[0]).sin() * (PI * f[1] * r[1]).sin() * (PI * f[2] * r[2]).sin())
            .sum()
    }
}

impl BoundaryPreset {
    pub fn build(&self, grid: &Grid) -> Arc<dyn SpaceTimeField> {
        match *self {
            Self::Constant { level } => Arc::new(ConstantField(level)),
            Self::Affine { level, slope, rate } => {
                Arc::new(AffineField { constant: level, slope: Vector3::from(slope), rate })
            }
            Self::Wave { level, amplitude, rate } => {
                let lo = grid.lo();
                let hi = grid.hi();
                Arc::new(SineProductField {
                    constant: level,
                    amplitude,
                    lo,
                    len: [0, 1, 2].map(|d| hi[d] - lo[d]),
                    active: [true, false, false],
                    rate,
                })
            }
        }
    }
}
