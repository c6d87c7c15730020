//! Explicit Euler time integration with conservative face fluxes.

use serde::{Deserialize, Serialize};

use super::{ProblemSpec, SolverError};
use crate::constitutive::{kernel_constants, ToleranceSpec};
use crate::field_grid::{divergence, flux_with, FluxWorkspace, Grid, ScalarField, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControls {
    /// Fraction of the stability limit, in `(0, 1]`.
    pub safety: f64,
    pub max_dt: Option<f64>,
    /// Store a snapshot every this many steps; zero stores only the first and
    /// last states.
    pub snapshot_every: usize,
    pub tolerance: ToleranceSpec,
}

impl Default for StepControls {
    fn default() -> Self {
        Self { safety: 0.4, max_dt: None, snapshot_every: 0, tolerance: ToleranceSpec::default() }
    }
}

impl StepControls {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(SolverError::InvalidControls(format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        if let Some(m) = self.max_dt {
            if !(m > 0.0 && m.is_finite()) {
                return Err(SolverError::InvalidControls(format!("max_dt must be positive, got {m}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub u: ScalarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub max_residual: f64,
    pub newton_iterations: usize,
    pub continuations: usize,
    /// `|φ Σ Δu vol − dt (boundary flux + Σ f vol)|` relative to the sum of the
    /// magnitudes of the three contributions.
    pub balance_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory always holds the initial state")
    }

    pub fn max_balance_residual(&self) -> f64 {
        self.steps.iter().fold(0.0, |m, s| m.max(s.balance_residual))
    }

    /// Largest number of steps between two consecutive snapshots.
    pub fn max_cadence(&self) -> usize {
        self.snapshots.windows(2).map(|w| w[1].step - w[0].step).max().unwrap_or(0)
    }
}

/// `dt = safety φ min(dx²) / (6 Λ)` with `Λ = c7 (1 + χ1)^a`, capped by
/// `max_dt`.
pub fn stable_dt(spec: &ProblemSpec, controls: &StepControls) -> f64 {
    let k = kernel_constants(&spec.law, &spec.env.rot);
    let h = spec.grid.min_dx();
    let dt = controls.safety * spec.env.phi * h * h / (6.0 * k.lipschitz_bound());
    match controls.max_dt {
        Some(m) => dt.min(m),
        None => dt,
    }
}

/// Mutable state carried between steps.
pub struct Stepper<'a> {
    spec: &'a ProblemSpec,
    tol: ToleranceSpec,
    ws: FluxWorkspace,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a ProblemSpec, tol: ToleranceSpec) -> Self {
        Self { spec, tol, ws: FluxWorkspace::new(&spec.grid) }
    }

    /// One explicit Euler step `u + (dt/φ)(div q + f)`.
    pub fn step(&mut self, u: &ScalarField, t: f64, dt: f64) -> Result<(ScalarField, StepRecord), SolverError> {
        let spec = self.spec;
        let grid = &spec.grid;
        let fluxes = flux_with(&mut self.ws, grid, &spec.env, &spec.law, self.tol, u, t, spec.psi.as_ref())?;
        let div = divergence(grid, &fluxes.faces)?;
        let source: Vec<f64> = match &spec.source {
            Some(src) => (0..grid.num_cells()).map(|idx| src.value(&grid.center_of(idx), t)).collect(),
            None => vec![0.0; grid.num_cells()],
        };
        let scale = dt / spec.env.phi;
        let mut next = u.clone();
        for ((n, d), q) in next.data.iter_mut().zip(&div.data).zip(&source) {
            *n += scale * (d + q);
        }
        if !next.is_finite() {
            return Err(SolverError::NonFinite { t });
        }
        let balance_residual = balance_residual(grid, spec.env.phi, u, &next, &fluxes.faces, &source, dt);
        let record = StepRecord {
            t: t + dt,
            dt,
            max_residual: fluxes.max_residual,
            newton_iterations: fluxes.newton_iterations,
            continuations: fluxes.continuations,
            balance_residual,
        };
        Ok((next, record))
    }
}

/// Conservation defect of one step, normalized by the total magnitudes of
/// storage, face fluxes and source.
pub fn balance_residual(
    grid: &Grid,
    phi: f64,
    u: &ScalarField,
    next: &ScalarField,
    faces: &crate::field_grid::FaceField,
    source: &[f64],
    dt: f64,
) -> f64 {
    let vol = grid.cell_volume();
    let n = grid.n();
    let mut storage = 0.0;
    let mut storage_abs = 0.0;
    for (a, b) in next.data.iter().zip(&u.data) {
        let d = a - b;
        storage += d;
        storage_abs += d.abs();
    }
    storage *= phi * vol;
    storage_abs *= phi * vol;

    let mut boundary = 0.0;
    let mut flux_abs = 0.0;
    for d in 0..3 {
        let area = grid.face_area(d);
        let mut m = n;
        m[d] += 1;
        for k in 0..m[2] {
            for j in 0..m[1] {
                for i in 0..m[0] {
                    let q = faces.normal[d][grid.face_index(d, i, j, k)];
                    flux_abs += q.abs() * area;
                    let pos = [i, j, k][d];
                    if pos == 0 {
                        boundary -= q * area;
                    } else if pos == n[d] {
                        boundary += q * area;
                    }
                }
            }
        }
    }
    let src: f64 = source.iter().sum::<f64>() * vol;
    let src_abs: f64 = source.iter().map(|v| v.abs()).sum::<f64>() * vol;
    let defect = storage - dt * (boundary + src);
    let scale = storage_abs + dt * (flux_abs + src_abs);
    if scale == 0.0 {
        0.0
    } else {
        defect.abs() / scale
    }
}

/// Integrates from `0` to `T` with `dt = stable_dt`; the final step lands on
/// `T` exactly.
pub fn run(spec: &ProblemSpec, controls: &StepControls) -> Result<Trajectory, SolverError> {
    spec.validate()?;
    controls.validate()?;
    let mut traj = Trajectory {
        snapshots: vec![Snapshot { step: 0, t: 0.0, u: spec.u0.clone() }],
        steps: Vec::new(),
    };
    if spec.t_final == 0.0 {
        return Ok(traj);
    }
    let dt = stable_dt(spec, controls);
    let num_steps = ((spec.t_final / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut stepper = Stepper::new(spec, controls.tolerance);
    let mut u = spec.u0.clone();
    let mut t = 0.0;
    for k in 1..=num_steps {
        let t_next = if k == num_steps { spec.t_final } else { k as f64 * dt };
        let h = t_next - t;
        match stepper.step(&u, t, h) {
            Ok((next, mut record)) => {
                record.t = t_next;
                u = next;
                t = t_next;
                traj.steps.push(record);
                let cadence_hit = controls.snapshot_every > 0 && k % controls.snapshot_every == 0;
                if cadence_hit || k == num_steps {
                    traj.snapshots.push(Snapshot { step: k, t, u: u.clone() });
                }
            }
            Err(e) => {
                if traj.last().step != k - 1 {
                    traj.snapshots.push(Snapshot { step: k - 1, t, u });
                }
                return Err(SolverError::RunFailed { source: Box::new(e), partial: Box::new(traj) });
            }
        }
    }
    Ok(traj)
}

/// Snapshots of `ū = u − Ψ(·, t)`.
pub fn shifted(traj: &Trajectory, grid: &Grid, psi: &dyn SpaceTimeField) -> Vec<Snapshot> {
    traj.snapshots
        .iter()
        .map(|s| {
            let p = ScalarField::from_fn(grid, |x| psi.value(x, s.t));
            Snapshot { step: s.step, t: s.t, u: s.u.sub(&p) }
        })
        .collect()
}
