//! Smooth cutoff functions `ζ` supported inside the box.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::AuditError;
use crate::field_grid::Grid;

/// Peak slope of the smoothstep `3r² − 2r³` on `[0, 1]`.
pub const SMOOTHSTEP_MAX_SLOPE: f64 = 1.5;

#[inline]
fn smoothstep(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    r * r * (3.0 - 2.0 * r)
}

#[inline]
fn smoothstep_slope(r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 {
        0.0
    } else {
        6.0 * r * (1.0 - r)
    }
}

/// Time factor rising from 0 at `t_start − ramp` to 1 at `t_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalRamp {
    pub t_start: f64,
    pub ramp: f64,
}

impl TemporalRamp {
    pub fn new(t_start: f64, ramp: f64) -> Result<Self, AuditError> {
        if !(ramp > 0.0 && ramp < t_start && t_start.is_finite()) {
            return Err(AuditError::Precondition(format!(
                "temporal cutoff needs 0 < t0 < T0, got t0 = {ramp}, T0 = {t_start}"
            )));
        }
        Ok(Self { t_start, ramp })
    }

    pub fn value(&self, t: f64) -> f64 {
        smoothstep((t - (self.t_start - self.ramp)) / self.ramp)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        smoothstep_slope((t - (self.t_start - self.ramp)) / self.ramp) / self.ramp
    }
}

/// `ζ(x, t) = τ(t) Π_d ρ_d(x_d)`, with each `ρ_d` a pair of smoothstep ramps
/// of width `margin` that start one cell inside the box. `ζ ≡ 1` on the inner
/// box `U′` and `ζ = 0` on the outermost cell layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    outer_lo: [f64; 3],
    outer_hi: [f64; 3],
    margin: f64,
    temporal: Option<TemporalRamp>,
}

pub fn build_cutoff(grid: &Grid, margin: f64, temporal: Option<TemporalRamp>) -> Result<Cutoff, AuditError> {
    let dx = grid.dx();
    let needed = 2.0 * grid.max_dx();
    if !(margin.is_finite() && margin >= needed * (1.0 - 1e-12)) {
        return Err(AuditError::Precondition(format!("cutoff margin {margin} is below 2·max dx = {needed}")));
    }
    let lo = grid.lo();
    let hi = grid.hi();
    let outer_lo = [0, 1, 2].map(|d| lo[d] + dx[d]);
    let outer_hi = [0, 1, 2].map(|d| hi[d] - dx[d]);
    for d in 0..3 {
        if outer_lo[d] + margin >= outer_hi[d] - margin {
            return Err(AuditError::Precondition(format!(
                "cutoff margin {margin} leaves an empty inner box along axis {d}"
            )));
        }
    }
    Ok(Cutoff { outer_lo, outer_hi, margin, temporal })
}

impl Cutoff {
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn temporal(&self) -> Option<TemporalRamp> {
        self.temporal
    }

    /// Corners of the inner box `U′`.
    pub fn inner_box(&self) -> ([f64; 3], [f64; 3]) {
        (
            [0, 1, 2].map(|d| self.outer_lo[d] + self.margin),
            [0, 1, 2].map(|d| self.outer_hi[d] - self.margin),
        )
    }

    pub fn in_inner(&self, x: &Vector3<f64>) -> bool {
        let (lo, hi) = self.inner_box();
        (0..3).all(|d| x[d] >= lo[d] && x[d] <= hi[d])
    }

    fn axis_factor(&self, d: usize, x: f64) -> (f64, f64) {
        let rl = (x - self.outer_lo[d]) / self.margin;
        let rh = (self.outer_hi[d] - x) / self.margin;
        let v = smoothstep(rl) * smoothstep(rh);
        let dv = (smoothstep_slope(rl) * smoothstep(rh) - smoothstep(rl) * smoothstep_slope(rh)) / self.margin;
        (v, dv)
    }

    pub fn spatial(&self, x: &Vector3<f64>) -> f64 {
        (0..3).map(|d| self.axis_factor(d, x[d]).0).product()
    }

    pub fn spatial_gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let f = [0, 1, 2].map(|d| self.axis_factor(d, x[d]));
        Vector3::new(f[0].1 * f[1].0 * f[2].0, f[0].0 * f[1].1 * f[2].0, f[0].0 * f[1].0 * f[2].1)
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        self.temporal.map_or(1.0, |r| r.value(t))
    }

    pub fn time_factor_derivative(&self, t: f64) -> f64 {
        self.temporal.map_or(0.0, |r| r.derivative(t))
    }

    pub fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        self.time_factor(t) * self.spatial(x)
    }

    pub fn gradient(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
        self.spatial_gradient(x) * self.time_factor(t)
    }

    pub fn time_derivative(&self, x: &Vector3<f64>, t: f64) -> f64 {
        self.time_factor_derivative(t) * self.spatial(x)
    }

    /// Largest `|∂ζ/∂x_d|` of the analytic cutoff over all `x`.
    pub fn max_partial(&self) -> f64 {
        SMOOTHSTEP_MAX_SLOPE / self.margin
    }

    /// Largest `|∇ζ|` over the cell centers of `grid`.
    pub fn max_gradient_on(&self, grid: &Grid) -> f64 {
        (0..grid.num_cells()).map(|i| self.spatial_gradient(&grid.center_of(i)).norm()).fold(0.0, f64::max)
    }

    /// Largest `|ζ_t|`; zero for a spatial-only cutoff.
    pub fn max_time_derivative(&self) -> f64 {
        self.temporal.map_or(0.0, |r| SMOOTHSTEP_MAX_SLOPE / r.ramp)
    }
}
