//! Cellwise derived quantities of every stored snapshot, and the quadrature
//! rules shared by the audits.

use nalgebra::{Matrix3, Vector3};

use crate::field_grid::{gradient, EnvironmentParams, FieldError, Grid, ScalarField};
use crate::solver::Trajectory;

use crate::field_grid::VecField;

/// Derived fields of one snapshot.
#[derive(Debug, Clone)]
pub(crate) struct Slice {
    pub t: f64,
    pub u: Vec<f64>,
    pub grad_norm: Vec<f64>,
    /// `K = (1 + |∇u + u² Z|)^{-a}`.
    pub weight: Vec<f64>,
    /// Squared Frobenius norm of `D²u`.
    pub hess_sq: Vec<f64>,
    pub z_norm: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Profile {
    pub vol: f64,
    pub slices: Vec<Slice>,
}

fn second_differences(grid: &Grid, u: &ScalarField, grad: &VecField) -> Result<Vec<f64>, FieldError> {
    let n = grid.n();
    let h = grid.dx();
    let comps: Vec<VecField> = (0..3)
        .map(|c| gradient(grid, &ScalarField::from_vec(grid, grad.data.iter().map(|g| g[c]).collect())?))
        .collect::<Result<_, _>>()?;
    let stride = [1usize, n[0], n[0] * n[1]];
    let mut out = vec![0.0; grid.num_cells()];
    for (idx, p) in grid.cells() {
        let interior = (0..3).all(|d| p[d] > 0 && p[d] + 1 < n[d]);
        let mut m = Matrix3::zeros();
        if interior {
            let at = |off: [isize; 3]| {
                let o: isize = (0..3).map(|d| off[d] * stride[d] as isize).sum();
                u.data[(idx as isize + o) as usize]
            };
            for d in 0..3 {
                let mut e = [0isize; 3];
                e[d] = 1;
                let minus = [-e[0], -e[1], -e[2]];
                m[(d, d)] = (at(e) - 2.0 * u.data[idx] + at(minus)) / (h[d] * h[d]);
                for q in (d + 1)..3 {
                    let mut pp = [0isize; 3];
                    pp[d] = 1;
                    pp[q] = 1;
                    let mut pm = pp;
                    pm[q] = -1;
                    let mut mp = pp;
                    mp[d] = -1;
                    let mut mm = pm;
                    mm[d] = -1;
                    let v = (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * h[d] * h[q]);
                    m[(d, q)] = v;
                    m[(q, d)] = v;
                }
            }
        } else {
            for c in 0..3 {
                for d in 0..3 {
                    m[(c, d)] = comps[c].data[idx][d];
                }
            }
            m = (m + m.transpose()) * 0.5;
        }
        out[idx] = m.norm_squared();
    }
    Ok(out)
}

impl Profile {
    pub fn build(grid: &Grid, env: &EnvironmentParams, a: f64, traj: &Trajectory) -> Result<Self, FieldError> {
        let forcing = env.forcing();
        let mut slices = Vec::with_capacity(traj.snapshots.len());
        for snap in &traj.snapshots {
            snap.u.matches(grid)?;
            let z = forcing.at_time(snap.t);
            let grad = gradient(grid, &snap.u)?;
            let mut weight = Vec::with_capacity(grid.num_cells());
            let mut z_norm = Vec::with_capacity(grid.num_cells());
            for (idx, g) in grad.data.iter().enumerate() {
                let zc: Vector3<f64> = z.eval(&grid.center_of(idx));
                let uc = snap.u.data[idx];
                weight.push((1.0 + (g + zc * (uc * uc)).norm()).powf(-a));
                z_norm.push(zc.norm());
            }
            slices.push(Slice {
                t: snap.t,
                u: snap.u.data.clone(),
                grad_norm: grad.data.iter().map(|g| g.norm()).collect(),
                hess_sq: second_differences(grid, &snap.u, &grad)?,
                weight,
                z_norm,
            });
        }
        Ok(Self { vol: grid.cell_volume(), slices })
    }

    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    pub fn final_time(&self) -> f64 {
        self.slices.last().map_or(0.0, |s| s.t)
    }

    /// Midpoint rule `Σ f vol` on one slice.
    pub fn space<F: Fn(&Slice, usize) -> f64>(&self, slice: &Slice, f: F) -> f64 {
        (0..slice.u.len()).map(|i| f(slice, i)).sum::<f64>() * self.vol
    }

    /// Trapezoid rule over `[t_from, T]` applied to the per-slice values,
    /// interpolating linearly inside the interval containing `t_from`.
    pub fn time_from(&self, values: &[f64], t_from: f64) -> f64 {
        trapezoid_from(&self.times(), values, t_from)
    }

    /// `∫_{t_from}^T ∫ f dx dt`.
    pub fn space_time<F: Fn(&Slice, usize) -> f64>(&self, t_from: f64, f: F) -> f64 {
        let values: Vec<f64> = self.slices.iter().map(|s| self.space(s, &f)).collect();
        self.time_from(&values, t_from)
    }
}

/// Trapezoid rule for the piecewise-linear interpolant of `(times, values)`
/// over `[t_from, times.last()]`.
pub(crate) fn trapezoid_from(times: &[f64], values: &[f64], t_from: f64) -> f64 {
    let mut total = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t1 <= t_from || t1 <= t0 {
            continue;
        }
        let (mut a, mut fa) = (t0, values[k - 1]);
        if t0 < t_from {
            let w = (t_from - t0) / (t1 - t0);
            a = t_from;
            fa = values[k - 1] + w * (values[k] - values[k - 1]);
        }
        total += 0.5 * (t1 - a) * (fa + values[k]);
    }
    total
}
