//! TOML run configuration with strict keys and full validation on load.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::auditor::{EstimateParams, SWEEP_ESTIMATES};
use crate::constitutive::{ForchheimerLaw, RotationSpec, ToleranceSpec};
use crate::field_grid::{nondimensionalize, EnvironmentParams, Grid, PhysicalParams};
use crate::solver::{BoundaryPreset, InitialPreset, ProblemSpec, StepControls};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NondimensionalBlock {
    #[serde(default = "one")]
    pub phi: f64,
    #[serde(default = "one")]
    pub gravity: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub omega0: f64,
    #[serde(default = "yes")]
    pub gravity_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawBlock {
    #[serde(default = "default_coefficients")]
    pub coefficients: Vec<f64>,
    #[serde(default = "default_exponents")]
    pub exponents: Vec<f64>,
}

impl Default for LawBlock {
    fn default() -> Self {
        Self { coefficients: default_coefficients(), exponents: default_exponents() }
    }
}

/// Exactly one of `rho_star` and `coriolis` may be given; neither means
/// `coriolis = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationBlock {
    #[serde(default = "vertical")]
    pub axis: [f64; 3],
    pub rho_star: Option<f64>,
    pub coriolis: Option<f64>,
}

impl Default for RotationBlock {
    fn default() -> Self {
        Self { axis: vertical(), rho_star: None, coriolis: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default)]
    pub lo: [f64; 3],
    #[serde(default = "unit")]
    pub hi: [f64; 3],
    #[serde(default = "cells")]
    pub n: [usize; 3],
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { lo: [0.0; 3], hi: unit(), n: cells() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataBlock {
    #[serde(default = "default_initial")]
    pub initial: InitialPreset,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryPreset,
}

impl Default for DataBlock {
    fn default() -> Self {
        Self { initial: default_initial(), boundary: default_boundary() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_cadence")]
    pub snapshot_every: usize,
    pub max_dt: Option<f64>,
}

impl Default for TimeBlock {
    fn default() -> Self {
        Self { t_final: default_t_final(), safety: default_safety(), snapshot_every: default_cadence(), max_dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditBlock {
    #[serde(default = "default_estimates")]
    pub estimates: Vec<String>,
    /// Per-estimate exponent overrides.
    #[serde(default)]
    pub s: BTreeMap<String, f64>,
    pub margin: Option<f64>,
    pub t_start: Option<f64>,
    pub ramp: Option<f64>,
    #[serde(default)]
    pub temporal: bool,
    pub time: Option<f64>,
    #[serde(default = "yes")]
    pub max_principle: bool,
    #[serde(default)]
    pub require_nonnegative: bool,
}

impl Default for AuditBlock {
    fn default() -> Self {
        Self {
            estimates: default_estimates(),
            s: BTreeMap::new(),
            margin: None,
            t_start: None,
            ramp: None,
            temporal: false,
            time: None,
            max_principle: true,
            require_nonnegative: false,
        }
    }
}

impl AuditBlock {
    pub fn params_for(&self, id: &str) -> EstimateParams {
        EstimateParams {
            s: self.s.get(id).copied(),
            margin: self.margin,
            t_start: self.t_start,
            ramp: self.ramp,
            temporal: self.temporal,
            time: self.time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default = "default_sweep")]
    pub omega_star: Vec<f64>,
    /// Defaults to the rotation block's `rho_star`, then to 0.5.
    pub rho_star: Option<f64>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self { omega_star: default_sweep(), rho_star: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Spatial,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsBlock {
    #[serde(default = "default_case")]
    pub case: String,
    #[serde(default = "default_kind")]
    pub kind: StudyKind,
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default = "default_mms_t")]
    pub t_final: f64,
    /// Grid of the temporal study.
    #[serde(default = "default_temporal_n")]
    pub n: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

impl Default for MmsBlock {
    fn default() -> Self {
        Self {
            case: default_case(),
            kind: default_kind(),
            grids: default_grids(),
            t_final: default_mms_t(),
            n: default_temporal_n(),
            levels: default_levels(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBlock {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

impl Default for KernelBlock {
    fn default() -> Self {
        Self { samples: default_samples(), radius: default_radius() }
    }
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub seed: u64,
    pub nondimensional: Option<NondimensionalBlock>,
    pub physical: Option<PhysicalParams>,
    #[serde(default)]
    pub law: LawBlock,
    pub rotation: Option<RotationBlock>,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub data: DataBlock,
    #[serde(default)]
    pub time: TimeBlock,
    #[serde(default)]
    pub audit: AuditBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub mms: MmsBlock,
    #[serde(default)]
    pub kernel: KernelBlock,
}

/// A validated configuration with the derived model objects.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub seed: u64,
    pub env: EnvironmentParams,
    pub law: ForchheimerLaw,
    pub grid: Grid,
    pub controls: StepControls,
    /// `ρ₊` used by sweeps.
    pub sweep_rho_star: f64,
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let law = ForchheimerLaw::new(raw.law.coefficients.clone(), raw.law.exponents.clone())
            .map_err(|e| invalid("law", e))?;
        let (env, rho_star) = match (&raw.nondimensional, &raw.physical) {
            (Some(_), Some(_)) => {
                return Err(invalid("nondimensional/physical", "exactly one parameter block may be given, found both"))
            }
            (None, None) => {
                return Err(invalid("nondimensional/physical", "exactly one parameter block is required, found neither"))
            }
            (None, Some(p)) => {
                if raw.rotation.is_some() {
                    return Err(invalid("rotation", "the physical block already fixes the axis and rho_star"));
                }
                (nondimensionalize(p).map_err(|e| invalid("physical", e))?, Some(p.rho_star))
            }
            (Some(nd), None) => {
                let rb = raw.rotation.clone().unwrap_or_default();
                let coriolis = match (rb.rho_star, rb.coriolis) {
                    (Some(_), Some(_)) => return Err(invalid("rotation", "give rho_star or coriolis, not both")),
                    (Some(r), None) => {
                        if !(r >= 0.0 && r.is_finite()) {
                            return Err(invalid("rotation.rho_star", format!("must be >= 0, got {r}")));
                        }
                        2.0 * r * nd.omega / nd.phi
                    }
                    (None, Some(c)) => c,
                    (None, None) => 0.0,
                };
                let rot = RotationSpec::from_direction(rb.axis, coriolis).map_err(|e| invalid("rotation", e))?;
                let mut env = EnvironmentParams::new(nd.phi, nd.gravity, nd.omega, nd.theta, nd.omega0, rot)
                    .map_err(|e| invalid("nondimensional", e))?;
                env.gravity_enabled = nd.gravity_enabled;
                env.validate().map_err(|e| invalid("nondimensional", e))?;
                (env, rb.rho_star)
            }
        };
        let grid = Grid::new(raw.grid.lo, raw.grid.hi, raw.grid.n).map_err(|e| invalid("grid", e))?;
        let t = &raw.time;
        if !(t.t_final >= 0.0 && t.t_final.is_finite()) {
            return Err(invalid("time.t_final", format!("must be >= 0, got {}", t.t_final)));
        }
        let controls = StepControls {
            safety: t.safety,
            max_dt: t.max_dt,
            snapshot_every: t.snapshot_every,
            tolerance: ToleranceSpec::default(),
        };
        controls.validate().map_err(|e| invalid("time", e))?;
        let sweep_rho_star = raw.sweep.rho_star.or(rho_star).unwrap_or(0.5);
        if !(sweep_rho_star >= 0.0 && sweep_rho_star.is_finite()) {
            return Err(invalid("sweep.rho_star", format!("must be >= 0, got {sweep_rho_star}")));
        }
        for id in raw.audit.estimates.iter().chain(raw.audit.s.keys()) {
            if !crate::auditor::ESTIMATES.contains(&id.as_str()) {
                return Err(invalid("audit.estimates", format!("unknown estimate '{id}'")));
            }
        }
        if raw.kernel.samples == 0 || !(raw.kernel.radius > 0.0) {
            return Err(invalid("kernel", "samples must be positive and radius > 0"));
        }
        Ok(Self { seed: raw.seed, env, law, grid, controls, sweep_rho_star, raw })
    }

    /// The initial-boundary value problem described by the configuration.
    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            env: self.env,
            law: self.law.clone(),
            u0: self.raw.data.initial.build(&self.grid, self.seed),
            psi: self.raw.data.boundary.build(&self.grid),
            grid: self.grid.clone(),
            t_final: self.raw.time.t_final,
            source: None,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn vertical() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}
fn unit() -> [f64; 3] {
    [1.0; 3]
}
fn cells() -> [usize; 3] {
    [16; 3]
}
fn default_coefficients() -> Vec<f64> {
    vec![1.0, 1.0]
}
fn default_exponents() -> Vec<f64> {
    vec![1.0]
}
fn default_initial() -> InitialPreset {
    InitialPreset::Bump { level: 1.0, amplitude: 0.5 }
}
fn default_boundary() -> BoundaryPreset {
    BoundaryPreset::Constant { level: 1.0 }
}
fn default_t_final() -> f64 {
    0.01
}
fn default_safety() -> f64 {
    0.4
}
fn default_cadence() -> usize {
    10
}
fn default_estimates() -> Vec<String> {
    SWEEP_ESTIMATES.iter().map(|s| s.to_string()).collect()
}
fn default_sweep() -> Vec<f64> {
    vec![0.0, 1.0, 5.0, 10.0]
}
fn default_case() -> String {
    "mms-trig".into()
}
fn default_kind() -> StudyKind {
    StudyKind::Spatial
}
fn default_grids() -> Vec<usize> {
    vec![8, 16, 32]
}
fn default_mms_t() -> f64 {
    0.005
}
fn default_temporal_n() -> usize {
    8
}
fn default_levels() -> usize {
    3
}
fn default_samples() -> usize {
    10_000
}
fn default_radius() -> f64 {
    1e3
}
