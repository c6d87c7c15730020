//! Face fluxes `X(∇u + u² Z)·n` with Dirichlet data on the boundary faces.

use nalgebra::Vector3;

use super::ops::neighbor;
use super::{gradient, EnvironmentParams, FaceField, FieldError, Grid, ScalarField, SpaceTimeField, VecField};
use crate::constitutive::{ForchheimerLaw, Inverter, ToleranceSpec};

/// Density below which velocity is not recovered from momentum.
pub const VELOCITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FaceFluxes {
    /// Component of `X(Φ_f)` along the face normal `+e_d`.
    pub faces: FaceField,
    pub max_residual: f64,
    pub newton_iterations: usize,
    pub continuations: usize,
}

/// Reusable buffers; the stored face momenta seed the next Newton solve.
#[derive(Debug, Clone, Default)]
pub struct FluxWorkspace {
    phi: [Vec<Vector3<f64>>; 3],
    guesses: [Vec<Vector3<f64>>; 3],
    boundary: [Vec<f64>; 3],
    tangential: Vec<[f64; 3]>,
}

impl FluxWorkspace {
    pub fn new(grid: &Grid) -> Self {
        Self {
            phi: [0, 1, 2].map(|d| vec![Vector3::zeros(); grid.num_faces(d)]),
            guesses: [0, 1, 2].map(|d| vec![Vector3::zeros(); grid.num_faces(d)]),
            boundary: [0, 1, 2].map(|d| vec![0.0; grid.num_faces(d)]),
            tangential: vec![[0.0; 3]; grid.num_cells()],
        }
    }

    fn fits(&self, grid: &Grid) -> bool {
        self.tangential.len() == grid.num_cells() && (0..3).all(|d| self.phi[d].len() == grid.num_faces(d))
    }

    /// Assembled `Φ` on faces normal to axis `d` from the last call.
    pub fn face_phi(&self, d: usize) -> &[Vector3<f64>] {
        &self.phi[d]
    }
}

/// Iterates faces normal to `d` as `(face index, pos along d, (i, j, k))`.
fn for_each_face(grid: &Grid, d: usize, mut f: impl FnMut(usize, usize, [usize; 3])) {
    let mut m = grid.n();
    m[d] += 1;
    for k in 0..m[2] {
        for j in 0..m[1] {
            for i in 0..m[0] {
                f(grid.face_index(d, i, j, k), [i, j, k][d], [i, j, k]);
            }
        }
    }
}

/// Assembles `Φ_f` on every face into the workspace.
pub fn assemble_face_phi(
    ws: &mut FluxWorkspace,
    grid: &Grid,
    env: &EnvironmentParams,
    u: &ScalarField,
    t: f64,
    boundary: &dyn SpaceTimeField,
) -> Result<(), FieldError> {
    u.matches(grid)?;
    if !ws.fits(grid) {
        *ws = FluxWorkspace::new(grid);
    }
    let n = grid.n();
    let dx = grid.dx();
    let z = env.forcing().at_time(t);

    for (d, bvals) in ws.boundary.iter_mut().enumerate() {
        for_each_face(grid, d, |f, pos, c| {
            if pos == 0 || pos == n[d] {
                bvals[f] = boundary.value(&grid.face_center(d, c[0], c[1], c[2]), t);
            }
        });
    }

    // tangential derivatives at cells, using the boundary trace in the
    // boundary layer
    for (idx, c) in grid.cells() {
        let mut g = [0.0; 3];
        for d in 0..3 {
            let h = dx[d];
            let at = |o: isize| u.data[neighbor(grid, idx, d, o)];
            g[d] = if c[d] == 0 {
                let b = ws.boundary[d][grid.face_index(d, c[0], c[1], c[2])];
                (-4.0 / 3.0 * b + at(0) + at(1) / 3.0) / h
            } else if c[d] == n[d] - 1 {
                let mut cf = c;
                cf[d] += 1;
                let b = ws.boundary[d][grid.face_index(d, cf[0], cf[1], cf[2])];
                (4.0 / 3.0 * b - at(0) - at(-1) / 3.0) / h
            } else {
                (at(1) - at(-1)) / (2.0 * h)
            };
        }
        ws.tangential[idx] = g;
    }

    for d in 0..3 {
        let h = dx[d];
        let bvals = &ws.boundary[d];
        let tang = &ws.tangential;
        let phi = &mut ws.phi[d];
        for_each_face(grid, d, |f, pos, c| {
            let x = grid.face_center(d, c[0], c[1], c[2]);
            let (grad, uf) = if pos == 0 || pos == n[d] {
                let b = bvals[f];
                let mut grad = boundary.gradient(&x, t);
                grad[d] = if pos == 0 {
                    let r = grid.index(c[0], c[1], c[2]);
                    (u.data[r] - b) / (0.5 * h)
                } else {
                    let mut cl = c;
                    cl[d] -= 1;
                    let l = grid.index(cl[0], cl[1], cl[2]);
                    (b - u.data[l]) / (0.5 * h)
                };
                (grad, b)
            } else {
                let r = grid.index(c[0], c[1], c[2]);
                let l = neighbor(grid, r, d, -1);
                let mut grad = Vector3::zeros();
                for e in 0..3 {
                    grad[e] = if e == d { (u.data[r] - u.data[l]) / h } else { 0.5 * (tang[l][e] + tang[r][e]) };
                }
                (grad, 0.5 * (u.data[l] + u.data[r]))
            };
            phi[f] = grad + z.eval(&x) * (uf * uf);
        });
    }
    Ok(())
}

/// Face fluxes for the state `u` at time `t`.
pub fn flux(
    grid: &Grid,
    env: &EnvironmentParams,
    law: &ForchheimerLaw,
    u: &ScalarField,
    t: f64,
    boundary: &dyn SpaceTimeField,
) -> Result<FaceFluxes, FieldError> {
    let mut ws = FluxWorkspace::new(grid);
    flux_with(&mut ws, grid, env, law, ToleranceSpec::default(), u, t, boundary)
}

/// [`flux`] with reusable buffers and warm-started Newton solves.
#[allow(clippy::too_many_arguments)]
pub fn flux_with(
    ws: &mut FluxWorkspace,
    grid: &Grid,
    env: &EnvironmentParams,
    law: &ForchheimerLaw,
    tol: ToleranceSpec,
    u: &ScalarField,
    t: f64,
    boundary: &dyn SpaceTimeField,
) -> Result<FaceFluxes, FieldError> {
    assemble_face_phi(ws, grid, env, u, t, boundary)?;
    let inverter = Inverter::new(law, &env.rot, tol);
    let mut faces = FaceField::zeros(grid);
    let mut max_residual: f64 = 0.0;
    let mut newton_iterations = 0;
    let mut continuations = 0;
    for d in 0..3 {
        for (f, y) in ws.phi[d].iter().enumerate() {
            let inv = inverter.solve_from(y, &ws.guesses[d][f])?;
            max_residual = max_residual.max(inv.residual);
            newton_iterations += inv.iterations;
            continuations += inv.used_continuation as usize;
            ws.guesses[d][f] = inv.v;
            faces.normal[d][f] = inv.v[d];
        }
    }
    Ok(FaceFluxes { faces, max_residual, newton_iterations, continuations })
}

/// Cell-centered `Φ = ∇u + u² Z` with the diagnostic gradient.
pub fn cell_phi(grid: &Grid, env: &EnvironmentParams, u: &ScalarField, t: f64) -> Result<VecField, FieldError> {
    let mut phi = gradient(grid, u)?;
    let z = env.forcing().at_time(t);
    for (idx, p) in phi.data.iter_mut().enumerate() {
        let uc = u.data[idx];
        *p += z.eval(&grid.center_of(idx)) * (uc * uc);
    }
    Ok(phi)
}

/// Cell-centered momentum `ρv = −X(Φ)`.
pub fn cell_momentum(
    grid: &Grid,
    env: &EnvironmentParams,
    law: &ForchheimerLaw,
    u: &ScalarField,
    t: f64,
) -> Result<VecField, FieldError> {
    let phi = cell_phi(grid, env, u, t)?;
    let inverter = Inverter::new(law, &env.rot, ToleranceSpec::default());
    let mut out = VecField::zeros(grid);
    for (slot, y) in out.data.iter_mut().zip(&phi.data) {
        *slot = -inverter.solve(y)?.v;
    }
    Ok(out)
}

/// Velocity `v = ρv / (κ u)`, zero where `|u| <= VELOCITY_EPS`.
pub fn recover_velocity(momentum: &VecField, u: &ScalarField, kappa: f64) -> VecField {
    let mut out = momentum.clone();
    for (v, &uc) in out.data.iter_mut().zip(&u.data) {
        *v = if uc.abs() > VELOCITY_EPS { *v / (kappa * uc) } else { Vector3::zeros() };
    }
    out
}
