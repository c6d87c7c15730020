//! Ratio audits `lhs / rhs_data` for the catalogued a-priori estimates, with
//! every generic constant set to one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cutoff::{build_cutoff, Cutoff, TemporalRamp};
use super::energy::DataTerms;
use super::profile::Profile;
use super::AuditError;
use crate::constitutive::kernel_constants;
use crate::field_grid::env_bounds;
use crate::solver::{ProblemSpec, Trajectory};

pub const ESTIMATES: [&str; 28] = [
    "gradu0", "gradu1", "gradu2", "gradu3", "gradu4", "gradu6a", "gradu6b", "ab4", "ab1", "ab11", "ab2", "ab22",
    "ab23", "ab24", "ab31", "ab32", "ab33", "ab34", "ih0", "kug4", "ih1", "ih2", "pwtall", "pwtnew", "pwt6",
    "LUembed", "iterate1", "Kug3",
];

/// The estimates exercised by the parameter sweep.
pub const SWEEP_ESTIMATES: [&str; 12] =
    ["gradu6a", "gradu6b", "ab23", "ab24", "ab33", "ab34", "ih0", "ih1", "ih2", "kug4", "pwt6", "LUembed"];

/// Largest number of steps between snapshots accepted by audits that take a
/// supremum in time.
pub const MAX_SUP_CADENCE: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateParams {
    pub s: Option<f64>,
    /// Cutoff ramp width; defaults to `2·max dx`.
    pub margin: Option<f64>,
    /// `T₀`, the start of late-time windows; defaults to `T/2`.
    pub t_start: Option<f64>,
    /// `t₀`, the temporal ramp length; defaults to `T₀/2`.
    pub ramp: Option<f64>,
    /// Use the space-time cutoff in the estimates that take a general `ζ`.
    #[serde(default)]
    pub temporal: bool,
    /// Evaluation time of the single-slice estimate; defaults to `T`.
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate_id: String,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs_data: f64,
    pub ratio: f64,
    pub notes: String,
}

/// Default exponent of the estimates that take one.
pub fn default_s(id: &str, a: f64) -> Option<f64> {
    match id {
        "ab23" | "ab24" | "pwtall" | "pwtnew" | "pwt6" => Some(3.0),
        "ab33" | "ab34" => Some(3.0 - a),
        "ih0" | "kug4" | "ih1" | "ih2" => Some(5.0),
        "LUembed" | "iterate1" | "Kug3" => Some(1.0),
        _ => None,
    }
}

fn check_range(id: &str, s: f64, a: f64) -> Result<(), AuditError> {
    let (ok, range) = match id {
        "ab23" | "ab24" => ((2.0..=4.0).contains(&s), "[2, 4]".to_string()),
        "ab33" | "ab34" => (s > 2.0 - a && s < 4.0 - a, format!("({}, {})", 2.0 - a, 4.0 - a)),
        "ih0" => (s >= 4.0, "[4, inf)".to_string()),
        "kug4" => (s > 4.0, "(4, inf)".to_string()),
        "ih1" | "ih2" => (s > 4.0 - a, format!("({}, inf)", 4.0 - a)),
        "pwtall" | "pwtnew" | "pwt6" => (s >= 2.0, "[2, inf)".to_string()),
        "LUembed" => (s >= 1.0, "[1, inf)".to_string()),
        "iterate1" | "Kug3" => (s >= 0.0, "[0, inf)".to_string()),
        _ => (true, String::new()),
    };
    if ok && s.is_finite() {
        Ok(())
    } else {
        Err(AuditError::Range { id: id.to_string(), s, range })
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Precomputed state for auditing one trajectory against many estimates.
pub struct Auditor<'a> {
    spec: &'a ProblemSpec,
    traj: &'a Trajectory,
    profile: Profile,
    terms: DataTerms,
    a: f64,
    chi1: f64,
    c8: f64,
    chi_star: f64,
    mu_z: f64,
    m_z: f64,
}

/// Per-cell cutoff samples.
struct CutoffCells {
    cutoff: Cutoff,
    inner: Vec<bool>,
    spatial: Vec<f64>,
    grad_sq: Vec<f64>,
}

impl<'a> Auditor<'a> {
    pub fn new(traj: &'a Trajectory, spec: &'a ProblemSpec) -> Result<Self, AuditError> {
        let consts = kernel_constants(&spec.law, &spec.env.rot);
        let bounds = env_bounds(&spec.env, &spec.grid)?;
        let profile = Profile::build(&spec.grid, &spec.env, consts.a, traj)?;
        let terms = DataTerms::build(traj, spec)?;
        let forcing = spec.env.forcing();
        let corners = spec.grid.corners();
        let mut m_z = 0.0f64;
        for slice in &profile.slices {
            let z = forcing.at_time(slice.t);
            for c in &corners {
                m_z = m_z.max(z.eval(c).norm());
            }
            m_z = slice.z_norm.iter().fold(m_z, |m, &v| m.max(v));
        }
        Ok(Self {
            spec,
            traj,
            profile,
            terms,
            a: consts.a,
            chi1: consts.chi1,
            c8: consts.c8,
            chi_star: bounds.chi_star,
            mu_z: bounds.mu_z,
            m_z,
        })
    }

    pub fn chi_star(&self) -> f64 {
        self.chi_star
    }

    /// Sampled `sup |Z|` over the box corners, the cell centers and the
    /// snapshot times.
    pub fn m_z(&self) -> f64 {
        self.m_z
    }

    fn cutoff_cells(&self, margin: f64, temporal: Option<TemporalRamp>) -> Result<CutoffCells, AuditError> {
        let grid = &self.spec.grid;
        let cutoff = build_cutoff(grid, margin, temporal)?;
        let centers: Vec<_> = (0..grid.num_cells()).map(|i| grid.center_of(i)).collect();
        Ok(CutoffCells {
            inner: centers.iter().map(|x| cutoff.in_inner(x)).collect(),
            spatial: centers.iter().map(|x| cutoff.spatial(x)).collect(),
            grad_sq: centers.iter().map(|x| cutoff.spatial_gradient(x).norm_squared()).collect(),
            cutoff,
        })
    }

    fn require_sup_cadence(&self, id: &str) -> Result<(), AuditError> {
        let c = self.traj.max_cadence();
        if c > MAX_SUP_CADENCE {
            return Err(AuditError::Precondition(format!(
                "{id} takes a supremum in time and needs a snapshot at least every {MAX_SUP_CADENCE} steps, got {c}"
            )));
        }
        Ok(())
    }

    pub fn audit(&self, id: &str, params: &EstimateParams) -> Result<EstimateReport, AuditError> {
        if !ESTIMATES.contains(&id) {
            return Err(AuditError::UnknownEstimate(id.to_string()));
        }
        let a = self.a;
        let big_t = self.profile.final_time();
        if !(big_t > 0.0) {
            return Err(AuditError::Precondition("estimates need a trajectory with T > 0".into()));
        }
        let mut parameters = BTreeMap::new();
        let s = match default_s(id, a) {
            Some(d) => {
                let s = params.s.unwrap_or(d);
                check_range(id, s, a)?;
                parameters.insert("s".to_string(), s);
                s
            }
            None => f64::NAN,
        };
        let margin = params.margin.unwrap_or(2.0 * self.spec.grid.max_dx());
        let t_start = params.t_start.unwrap_or(0.5 * big_t);
        let ramp = params.ramp.unwrap_or(0.5 * t_start);
        let late = matches!(
            id,
            "ab2" | "ab22" | "ab24" | "ab32" | "ab34" | "kug4" | "ih2" | "pwtnew" | "pwt6"
        );
        let general_zeta = matches!(id, "ab4" | "iterate1" | "Kug3");
        let uses_inner = !matches!(
            id,
            "gradu0" | "gradu1" | "gradu2" | "gradu3" | "gradu4" | "gradu6a" | "gradu6b" | "ab4" | "iterate1" | "Kug3"
                | "LUembed"
        );
        let temporal = general_zeta && params.temporal;
        if late || temporal {
            if !(t_start > 0.0 && t_start < big_t) {
                return Err(AuditError::Precondition(format!("T0 must lie in (0, T), got {t_start}")));
            }
            parameters.insert("T0".to_string(), t_start);
        }
        let ramp_spec = if temporal {
            parameters.insert("t0".to_string(), ramp);
            Some(TemporalRamp::new(t_start, ramp)?)
        } else {
            None
        };
        let cells = if uses_inner || general_zeta || id == "LUembed" {
            parameters.insert("margin".to_string(), margin);
            Some(self.cutoff_cells(margin, ramp_spec)?)
        } else {
            None
        };
        if matches!(id, "pwtall" | "pwtnew" | "pwt6" | "iterate1") {
            self.require_sup_cadence(id)?;
        }

        let phi = self.terms.phi;
        let x = self.chi_star;
        let m = self.terms.m_star;
        let m1 = m + 1.0;
        let ub = self.terms.shifted_initial_sq;
        let gu0 = self.terms.initial_gradient_sq;
        let e_star = self.terms.e_star;
        let p = 1.0 + 1.0 / t_start;
        let n0 = self.terms.n0();
        let n_star = self.terms.n_star();
        let n2 = self.terms.n2();
        let prof = &self.profile;
        let inner = |i: usize| cells.as_ref().is_some_and(|c| c.inner[i]);
        let t_from = if late { t_start } else { 0.0 };
        let mut notes = String::new();

        let (lhs, rhs) = match id {
            "gradu0" | "gradu1" => {
                let l = if id == "gradu0" {
                    prof.space_time(0.0, |sl, i| sl.weight[i] * sl.grad_norm[i].powi(2))
                } else {
                    prof.space_time(0.0, |sl, i| sl.grad_norm[i].powf(2.0 - a))
                };
                let u2 = prof.space_time(0.0, |sl, i| sl.u[i] * sl.u[i]);
                let u4 = prof.space_time(0.0, |sl, i| sl.u[i].powi(4));
                let c = (1.0 + self.chi1).powf(2.0 * (2.0 + a));
                let mid = if id == "gradu0" { c * self.m_z * self.m_z * u4 } else { c * (big_t + self.m_z * self.m_z * u4) };
                (l, self.chi1 * self.chi1 * phi * (ub + u2) + mid + self.terms.e0)
            }
            "gradu2" | "gradu4" | "gradu6a" => {
                let l = prof.space_time(0.0, |sl, i| sl.weight[i] * sl.grad_norm[i].powi(2));
                let r = match id {
                    "gradu2" => {
                        x * x * phi * ub + x.powf(2.0 * (4.0 + a)) * big_t * m * m * m1 * m1 + x.powf(2.0 * (2.0 + a)) * e_star
                    }
                    "gradu4" => x.powf(2.0 * (4.0 + a)) * m1 * m1 * n0,
                    _ => x.powf(2.0 * (4.0 + a)) * m1.powi(4) * n_star,
                };
                (l, r)
            }
            "gradu3" | "gradu6b" => {
                let l = prof.space_time(0.0, |sl, i| sl.grad_norm[i].powf(2.0 - a));
                let r = if id == "gradu3" {
                    x * x * phi * ub + x.powf(2.0 * (4.0 + a)) * big_t * m1.powi(4) + x.powf(2.0 * (2.0 + a)) * e_star
                } else {
                    x.powf(2.0 * (4.0 + a)) * m1.powi(4) * n_star
                };
                (l, r)
            }
            "ab4" => {
                let c = cells.as_ref().expect("cutoff built");
                let zeta = |t: f64, i: usize| c.spatial[i] * c.cutoff.time_factor(t);
                let l = prof.space_time(0.0, |sl, i| {
                    let z = zeta(sl.t, i);
                    sl.weight[i] * (sl.grad_norm[i].powi(4) + m * m * sl.hess_sq[i]) * z * z
                });
                let d0 = self.terms.d_s(0.0, self.spec, &c.cutoff);
                let sup_grad = c.cutoff.max_gradient_on(&self.spec.grid);
                let sup_t = c.cutoff.max_time_derivative();
                let brace = x.powf(2.0 * (5.0 + a)) * m * m * m1.powi(4) * phi * (ub + d0)
                    + x.powf(4.0 * (4.0 + a)) * big_t * m.powi(4) * m1.powi(8)
                    + x.powf(4.0 * (3.0 + a)) * m * m * m1.powi(4) * e_star;
                (l, (1.0 + sup_grad * sup_grad + sup_t * sup_t) * brace)
            }
            "ab1" | "ab11" | "ab2" | "ab22" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.weight[i] * sl.grad_norm[i].powi(4) } else { 0.0 });
                let r = match id {
                    "ab1" | "ab2" => {
                        let init = if id == "ab1" { ub + gu0 } else { ub };
                        let brace = x.powf(2.0 * (5.0 + a)) * m * m * m1.powi(4) * phi * init
                            + x.powf(4.0 * (4.0 + a)) * big_t * m.powi(4) * m1.powi(8)
                            + x.powf(4.0 * (3.0 + a)) * m * m * m1.powi(4) * e_star;
                        if id == "ab2" {
                            p * p * brace
                        } else {
                            brace
                        }
                    }
                    "ab11" => x.powf(4.0 * (4.0 + a)) * m * m * m1.powi(10) * n2,
                    _ => p * p * x.powf(4.0 * (4.0 + a)) * m * m * m1.powi(10) * n_star,
                };
                (l, r)
            }
            "ab23" | "ab24" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.weight[i] * sl.grad_norm[i].powf(s) } else { 0.0 });
                let base = x.powf((4.0 + a) * s) * m.powf(s - 2.0) * m1.powf(3.0 * s - 2.0);
                let r = if id == "ab23" { base * n2 } else { p.powf(s - 2.0) * base * n_star };
                (l, r)
            }
            "ab31" | "ab32" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.grad_norm[i].powf(4.0 - a) } else { 0.0 });
                let base = x.powf(4.0 * (4.0 + a)) * m1.powi(12);
                let r = if id == "ab31" { base * n2 } else { p * p * base * n_star };
                (l, r)
            }
            "ab33" | "ab34" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.grad_norm[i].powf(s) } else { 0.0 });
                let base = x.powf((4.0 + a) * (s + a)) * m1.powf(4.0 * (s + a - 1.0));
                let r = if id == "ab33" { base * n2 } else { p.powf(s + a - 2.0) * base * n_star };
                (l, r)
            }
            "ih0" | "kug4" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.weight[i] * sl.grad_norm[i].powf(s) } else { 0.0 });
                let r = if id == "ih0" {
                    x.powf((4.0 + a) * (s + 2.0)) * m * m * m1.powf(4.0 * s) * self.terms.n_index(s - 2.0)
                } else {
                    p.powf(s) * x.powf((4.0 + a) * (s + 2.0)) * m * m * m1.powf(4.0 * s + 2.0) * n_star
                };
                (l, r)
            }
            "ih1" | "ih2" => {
                let l = prof.space_time(t_from, |sl, i| if inner(i) { sl.grad_norm[i].powf(s) } else { 0.0 });
                let r = if id == "ih1" {
                    x.powf((4.0 + a) * (s + a + 2.0)) * m1.powf(4.0 * (s + a + 0.5)) * self.terms.n_index(s + a - 2.0)
                } else {
                    p.powf(s + a) * x.powf((4.0 + a) * (s + a + 2.0)) * m1.powf(4.0 * (s + a + 1.0)) * n_star
                };
                (l, r)
            }
            "pwtall" | "pwtnew" | "pwt6" => {
                let l = prof
                    .slices
                    .iter()
                    .filter(|sl| sl.t >= t_from)
                    .map(|sl| phi * prof.space(sl, |sl, i| if inner(i) { sl.grad_norm[i].powf(s) } else { 0.0 }))
                    .fold(0.0, f64::max);
                let r = match id {
                    "pwtall" => {
                        let term = if s == 2.0 {
                            x.powf(4.0 * (4.0 + a)) * m1.powi(6) * n0
                        } else if s <= 4.0 {
                            x.powf((s + 2.0) * (4.0 + a)) * m.powf(s - 2.0) * m1.powf(3.0 * s + 2.0) * n2
                        } else {
                            x.powf((s + 4.0) * (4.0 + a)) * m * m * m1.powf(4.0 * (s + 1.0)) * self.terms.n_index(s - 2.0)
                        };
                        phi * self.terms.initial_gradient_power(s) + term
                    }
                    "pwtnew" => {
                        if s == 2.0 {
                            x.powf((4.0 + a) * (4.0 + a))
                                * p.powf(1.0 + a)
                                * m1.powf(2.0 * (3.0 + a))
                                * (m.powf(a) * m1.powf(2.0 + a) * n_star + n0)
                        } else if s <= 4.0 - a {
                            x.powf((4.0 + a) * (s + a + 2.0))
                                * p.powf(s + a - 1.0)
                                * m.powf(s - 2.0)
                                * m1.powf(3.0 * s + 4.0 * a + 2.0)
                                * n_star
                        } else if s <= 4.0 {
                            x.powf((4.0 + a) * (s + a + 4.0))
                                * p.powf(s + a + 1.0)
                                * m.powf(s - 2.0)
                                * m1.powf(3.0 * s + 4.0 * a + 10.0)
                                * n_star
                        } else {
                            x.powf((4.0 + a) * (s + a + 4.0))
                                * p.powf(s + a + 1.0)
                                * m * m
                                * m1.powf(4.0 * s + 4.0 * a + 6.0)
                                * n_star
                        }
                    }
                    _ => x.powf((4.0 + a) * (s + a + 4.0)) * p.powf(s + a + 1.0) * m1.powf(4.0 * (s + a + 2.0)) * n_star,
                };
                (l, r)
            }
            "LUembed" => {
                let c = cells.as_ref().expect("cutoff built");
                let target = params.time.unwrap_or(big_t);
                let sl = prof
                    .slices
                    .iter()
                    .min_by(|p, q| (p.t - target).abs().total_cmp(&(q.t - target).abs()))
                    .expect("at least one snapshot");
                parameters.insert("time".to_string(), sl.t);
                let mu = self.mu_z;
                let l = prof.space(sl, |sl, i| sl.weight[i] * sl.grad_norm[i].powf(2.0 * s + 2.0) * c.spatial[i].powi(2));
                let sup_w2 = (0..sl.u.len())
                    .filter(|&i| c.spatial[i] > 0.0)
                    .map(|i| sl.u[i] * sl.u[i])
                    .fold(0.0, f64::max);
                let brace = prof.space(sl, |sl, i| {
                    let z2 = c.spatial[i].powi(2);
                    let g = sl.grad_norm[i];
                    let w = sl.u[i];
                    let hess = sl.weight[i] * sl.hess_sq[i] * (g.powf(2.0 * s - 2.0) + 1.0) * z2;
                    let lower = sl.weight[i] * g.powf(2.0 * s) * (c.grad_sq[i] + (w.abs() * mu + sl.z_norm[i]).powi(2) * z2 * w * w);
                    hess + lower
                });
                let tail = prof.space(sl, |sl, i| {
                    let wq = sl.u[i] * sl.u[i] * sl.z_norm[i];
                    (1.0 + wq.powf(2.0 * s)) * wq.powf(2.0 * s + 2.0) * c.spatial[i].powi(2)
                });
                (l, sup_w2 * brace + tail)
            }
            "iterate1" => {
                let c = cells.as_ref().expect("cutoff built");
                let cut = &c.cutoff;
                let zeta = |t: f64, i: usize| c.spatial[i] * cut.time_factor(t);
                let sup_part = prof
                    .slices
                    .iter()
                    .map(|sl| phi * prof.space(sl, |sl, i| sl.grad_norm[i].powf(2.0 * s + 2.0) * zeta(sl.t, i).powi(2)))
                    .fold(0.0, f64::max);
                let hess_part = (s + 1.0) * self.c8 / (self.chi1 * self.chi1)
                    * prof.space_time(0.0, |sl, i| {
                        sl.weight[i] * sl.hess_sq[i] * sl.grad_norm[i].powf(2.0 * s) * zeta(sl.t, i).powi(2)
                    });
                let c1a = (1.0 + self.chi1).powf(2.0 * (1.0 + a));
                let mz2 = self.m_z * self.m_z;
                let i0 = self.mu_z * self.mu_z * c1a
                    * prof.space_time(0.0, |sl, i| {
                        sl.weight[i] * sl.grad_norm[i].powf(2.0 * s) * sl.u[i].powi(4) * zeta(sl.t, i).powi(2)
                    })
                    + c1a
                        * prof.space_time(0.0, |sl, i| {
                            let tf = cut.time_factor(sl.t);
                            sl.weight[i]
                                * sl.grad_norm[i].powf(2.0 * s + 2.0)
                                * (mz2 * sl.u[i] * sl.u[i] * zeta(sl.t, i).powi(2) + c.grad_sq[i] * tf * tf)
                        })
                    + prof.space_time(0.0, |sl, i| {
                        sl.grad_norm[i].powf(2.0 * s + 2.0)
                            * zeta(sl.t, i)
                            * (c.spatial[i] * cut.time_factor_derivative(sl.t)).abs()
                    });
                notes = format!("lhs = max(sup-in-time term {sup_part:e}, second-derivative term {hess_part:e})");
                (sup_part.max(hess_part), phi * self.terms.d_s(s, self.spec, cut) + i0)
            }
            "Kug3" => {
                let c = cells.as_ref().expect("cutoff built");
                let cut = &c.cutoff;
                let zeta = |t: f64, i: usize| c.spatial[i] * cut.time_factor(t);
                let l = prof.space_time(0.0, |sl, i| {
                    let z2 = zeta(sl.t, i).powi(2);
                    let g = sl.grad_norm[i];
                    sl.weight[i] * (g.powf(2.0 * s + 4.0) + m * m * sl.hess_sq[i] * g.powf(2.0 * s)) * z2
                });
                let sgn = if s > 0.0 { 1.0 } else { 0.0 };
                let sup_zt = cut.max_time_derivative();
                let i_plus = x * x * m * m * phi * self.terms.d_s(s, self.spec, cut)
                    + big_t * x.powf(4.0 * (2.0 * s + 3.0)) * m.powi(6) * m1.powf(8.0 * s + 6.0)
                    + x.powf(2.0 * (4.0 + a))
                        * m * m
                        * m1.powi(4)
                        * prof.space_time(0.0, |sl, i| {
                            let tf = cut.time_factor(sl.t);
                            sl.weight[i] * sl.grad_norm[i].powf(2.0 * s + 2.0) * (zeta(sl.t, i).powi(2) + c.grad_sq[i] * tf * tf)
                        })
                    + sgn * m * m * prof.space_time(0.0, |sl, i| sl.weight[i] * sl.hess_sq[i] * zeta(sl.t, i).powi(2));
                let j_plus = big_t * x.powf(4.0 * (1.0 + a)) * m.powi(4) * m1.powf(4.0 * a) * sup_zt * sup_zt
                    + x.powf(4.0 * (1.0 + a * sgn))
                        * m.powi(4)
                        * m1.powf(4.0 * a * sgn)
                        * prof.space_time(0.0, |sl, i| {
                            let zt = c.spatial[i] * cut.time_factor_derivative(sl.t);
                            sl.weight[i] * sl.grad_norm[i].powf(2.0 * s + 2.0) * zt * zt
                        });
                (l, i_plus + j_plus)
            }
            _ => unreachable!("catalog membership checked above"),
        };
        Ok(EstimateReport {
            estimate_id: id.to_string(),
            parameters,
            lhs,
            rhs_data: rhs,
            ratio: ratio(lhs, rhs),
            notes,
        })
    }
}

pub fn estimate_audit(
    traj: &Trajectory,
    spec: &ProblemSpec,
    id: &str,
    params: &EstimateParams,
) -> Result<EstimateReport, AuditError> {
    Auditor::new(traj, spec)?.audit(id, params)
}
