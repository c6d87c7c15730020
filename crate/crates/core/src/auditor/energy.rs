//! Data functionals built from the initial state, the boundary data and the
//! trajectory's supremum.

use serde::{Deserialize, Serialize};

use super::cutoff::Cutoff;
use super::profile::trapezoid_from;
use super::AuditError;
use crate::constitutive::kernel_constants;
use crate::field_grid::gradient;
use crate::solver::{boundary_values, ProblemSpec, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderValue {
    pub s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeValue {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyQuantities {
    /// `max |u|` over the stored snapshots.
    pub m_star: f64,
    pub e0: f64,
    pub e_star: f64,
    pub n0: f64,
    pub n_star: f64,
    pub n2: f64,
    pub n_s: Vec<OrderValue>,
    pub d_s: Vec<OrderValue>,
    /// `sup |u0| + sup_{τ <= t} sup_{∂U} |ψ(τ)|` at each snapshot time.
    pub m0_curve: Vec<TimeValue>,
    /// `‖u0 − Ψ(·,0)‖²`.
    pub shifted_initial_sq: f64,
    /// `‖∇u0‖²` from the discrete gradient.
    pub initial_gradient_sq: f64,
    pub t_final: f64,
}

impl EnergyQuantities {
    /// Names of the orderings `ℰ₊ <= 𝒩₀ <= (M₊+1)²𝒩₊` and
    /// `ℰ₊ <= 𝒩₊ <= 𝒩₂ <= 𝒩ₛ` that fail; empty when all hold.
    pub fn ordering_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m1 = (self.m_star + 1.0) * (self.m_star + 1.0);
        let mut check = |ok: bool, name: String| {
            if !ok {
                out.push(name);
            }
        };
        check(self.e_star <= self.n0, "E_star <= N0".into());
        check(self.n0 <= m1 * self.n_star, "N0 <= (M_star+1)^2 N_star".into());
        check(self.e_star <= self.n_star, "E_star <= N_star".into());
        check(self.n_star <= self.n2, "N_star <= N2".into());
        for ns in &self.n_s {
            if ns.s > 2.0 {
                check(self.n2 <= ns.value, format!("N2 <= N_s (s = {})", ns.s));
            }
        }
        out
    }
}

/// Building blocks from which every data functional is assembled; the sums
/// are grouped identically so that the orderings survive rounding.
#[derive(Debug, Clone)]
pub(crate) struct DataTerms {
    pub phi: f64,
    pub vol: f64,
    pub t_final: f64,
    pub m_star: f64,
    pub e_star: f64,
    pub e0: f64,
    pub shifted_initial_sq: f64,
    pub initial_gradient_sq: f64,
    /// `|∇u0|` per cell.
    pub initial_gradient: Vec<f64>,
}

impl DataTerms {
    pub fn build(traj: &Trajectory, spec: &ProblemSpec) -> Result<Self, AuditError> {
        let grid = &spec.grid;
        let vol = grid.cell_volume();
        let first = traj
            .snapshots
            .first()
            .ok_or_else(|| AuditError::Precondition("trajectory holds no snapshots".into()))?;
        let u0 = &first.u;
        u0.matches(grid)?;
        let consts = kernel_constants(&spec.law, &spec.env.rot);
        let chi1 = consts.chi1;
        let a = consts.a;
        let phi = spec.env.phi;
        let psi = spec.psi.as_ref();

        let m_star = traj.snapshots.iter().map(|s| s.u.max_abs()).fold(0.0, f64::max);
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
        let mut grad_sq = Vec::with_capacity(times.len());
        let mut rate_val_sq = Vec::with_capacity(times.len());
        for &t in &times {
            let mut g = 0.0;
            let mut r = 0.0;
            for idx in 0..grid.num_cells() {
                let x = grid.center_of(idx);
                g += psi.gradient(&x, t).norm_squared();
                let pt = psi.time_derivative(&x, t);
                let pv = psi.value(&x, t);
                r += pt * pt + pv * pv;
            }
            grad_sq.push(g * vol);
            rate_val_sq.push(r * vol);
        }
        let int_grad = trapezoid_from(&times, &grad_sq, 0.0);
        let int_rate_val = trapezoid_from(&times, &rate_val_sq, 0.0);
        let e_star = int_grad + phi * int_rate_val;
        let e0 = chi1.powf(2.0 * (2.0 + a)) * int_grad + phi * chi1 * chi1 * int_rate_val;

        let shifted_initial_sq = (0..grid.num_cells())
            .map(|idx| {
                let d = u0.data[idx] - psi.value(&grid.center_of(idx), first.t);
                d * d
            })
            .sum::<f64>()
            * vol;
        let initial_gradient: Vec<f64> = gradient(grid, u0)?.data.iter().map(|g| g.norm()).collect();
        let initial_gradient_sq = initial_gradient.iter().map(|g| g * g).sum::<f64>() * vol;
        Ok(Self {
            phi,
            vol,
            t_final: times.last().copied().unwrap_or(0.0),
            m_star,
            e_star,
            e0,
            shifted_initial_sq,
            initial_gradient_sq,
            initial_gradient,
        })
    }

    pub fn initial_gradient_power(&self, s: f64) -> f64 {
        self.initial_gradient.iter().map(|g| g.powf(s)).sum::<f64>() * self.vol
    }

    pub fn n0(&self) -> f64 {
        (self.phi * self.shifted_initial_sq + self.t_final * self.m_star * self.m_star) + self.e_star
    }

    pub fn n_star(&self) -> f64 {
        (self.phi * self.shifted_initial_sq + self.t_final) + self.e_star
    }

    pub fn n2(&self) -> f64 {
        (self.phi * (self.shifted_initial_sq + self.initial_gradient_sq) + self.t_final) + self.e_star
    }

    pub fn n_s(&self, s: f64) -> f64 {
        let inner = (self.shifted_initial_sq + self.initial_gradient_sq) + self.initial_gradient_power(s);
        (self.phi * inner + self.t_final) + self.e_star
    }

    /// `𝒩₂` for `σ = 2` and `𝒩_σ` above.
    pub fn n_index(&self, sigma: f64) -> f64 {
        if sigma == 2.0 {
            self.n2()
        } else {
            self.n_s(sigma)
        }
    }

    /// `∫ |∇u0|^{2s+2} ζ²(x, 0) dx`.
    pub fn d_s(&self, s: f64, spec: &ProblemSpec, cutoff: &Cutoff) -> f64 {
        let grid = &spec.grid;
        self.initial_gradient
            .iter()
            .enumerate()
            .map(|(idx, g)| {
                let z = cutoff.value(&grid.center_of(idx), 0.0);
                g.powf(2.0 * s + 2.0) * z * z
            })
            .sum::<f64>()
            * self.vol
    }
}

/// `(t, max ψ, max |ψ|, min ψ)` over the boundary faces at the initial time
/// and at every step time.
pub(crate) fn boundary_history(traj: &Trajectory, spec: &ProblemSpec) -> Vec<(f64, f64, f64, f64)> {
    let t0 = traj.snapshots.first().map_or(0.0, |s| s.t);
    std::iter::once(t0)
        .chain(traj.steps.iter().map(|s| s.t))
        .map(|t| {
            let b = boundary_values(&spec.grid, spec.psi.as_ref(), t);
            let max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = b.iter().copied().fold(f64::INFINITY, f64::min);
            let max_abs = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (t, max, max_abs, min)
        })
        .collect()
}

/// Running value of `sup |u0| + sup_{τ <= t} sup_{∂U}|ψ(τ)|` at each snapshot.
pub(crate) fn m0_curve(traj: &Trajectory, history: &[(f64, f64, f64, f64)]) -> Vec<TimeValue> {
    let u0_max = traj.snapshots.first().map_or(0.0, |s| s.u.max_abs());
    let mut out = Vec::with_capacity(traj.snapshots.len());
    let mut k = 0;
    let mut running = 0.0f64;
    for snap in &traj.snapshots {
        while k < history.len() && history[k].0 <= snap.t {
            running = running.max(history[k].2);
            k += 1;
        }
        out.push(TimeValue { t: snap.t, value: u0_max + running });
    }
    out
}

/// Evaluates the data functionals. `s_list` selects the `𝒩ₛ`, `d_list` the
/// `𝒟ₛ`; the latter need a cutoff.
pub fn energy_quantities(
    traj: &Trajectory,
    spec: &ProblemSpec,
    s_list: &[f64],
    d_list: &[f64],
    cutoff: Option<&Cutoff>,
) -> Result<EnergyQuantities, AuditError> {
    if !d_list.is_empty() && cutoff.is_none() {
        return Err(AuditError::Precondition("D_s requested without a cutoff".into()));
    }
    for &s in s_list {
        if !(s >= 2.0 && s.is_finite()) {
            return Err(AuditError::Precondition(format!("N_s needs s >= 2, got {s}")));
        }
    }
    for &s in d_list {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(AuditError::Precondition(format!("D_s needs s >= 0, got {s}")));
        }
    }
    let terms = DataTerms::build(traj, spec)?;
    let history = boundary_history(traj, spec);
    Ok(EnergyQuantities {
        m_star: terms.m_star,
        e0: terms.e0,
        e_star: terms.e_star,
        n0: terms.n0(),
        n_star: terms.n_star(),
        n2: terms.n2(),
        n_s: s_list.iter().map(|&s| OrderValue { s, value: terms.n_index(s) }).collect(),
        d_s: match cutoff {
            Some(c) => d_list.iter().map(|&s| OrderValue { s, value: terms.d_s(s, spec, c) }).collect(),
            None => Vec::new(),
        },
        m0_curve: m0_curve(traj, &history),
        shifted_initial_sq: terms.shifted_initial_sq,
        initial_gradient_sq: terms.initial_gradient_sq,
        t_final: terms.t_final,
    })
}
