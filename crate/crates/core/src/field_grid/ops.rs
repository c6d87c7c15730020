//! Discrete gradient and divergence operators.

use nalgebra::Vector3;

use super::{FaceField, FieldError, Grid, ScalarField, VecField};

#[inline]
pub(crate) fn neighbor(grid: &Grid, idx: usize, d: usize, offset: isize) -> usize {
    let stride = match d {
        0 => 1,
        1 => grid.n()[0],
        _ => grid.n()[0] * grid.n()[1],
    } as isize;
    (idx as isize + offset * stride) as usize
}

/// Derivative along axis `d` at a cell: central in the interior and the
/// one-sided second-order stencil at the two boundary layers.
#[inline]
fn axis_derivative(grid: &Grid, u: &[f64], idx: usize, pos: usize, d: usize) -> f64 {
    let n = grid.n()[d];
    let h = grid.dx()[d];
    let at = |o: isize| u[neighbor(grid, idx, d, o)];
    if pos == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
    } else if pos == n - 1 {
        (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h)
    } else {
        (at(1) - at(-1)) / (2.0 * h)
    }
}

/// Cell-centered gradient for diagnostics.
pub fn gradient(grid: &Grid, u: &ScalarField) -> Result<VecField, FieldError> {
    u.matches(grid)?;
    let mut out = VecField::zeros(grid);
    for (idx, c) in grid.cells() {
        out.data[idx] = Vector3::new(
            axis_derivative(grid, &u.data, idx, c[0], 0),
            axis_derivative(grid, &u.data, idx, c[1], 1),
            axis_derivative(grid, &u.data, idx, c[2], 2),
        );
    }
    Ok(out)
}

/// Normal derivative on every face. Interior faces use the two-point
/// difference; boundary faces use the one-sided quadratic through the first
/// three cells, so the operator is exact on quadratics.
pub fn face_gradient(grid: &Grid, u: &ScalarField) -> Result<FaceField, FieldError> {
    u.matches(grid)?;
    let n = grid.n();
    let dx = grid.dx();
    let mut out = FaceField::zeros(grid);
    for d in 0..3 {
        let h = dx[d];
        let mut m = n;
        m[d] += 1;
        for k in 0..m[2] {
            for j in 0..m[1] {
                for i in 0..m[0] {
                    let pos = [i, j, k][d];
                    let f = grid.face_index(d, i, j, k);
                    let mut c = [i, j, k];
                    let value = if pos == 0 {
                        let idx = grid.index(c[0], c[1], c[2]);
                        let at = |o: isize| u.data[neighbor(grid, idx, d, o)];
                        (-2.0 * at(0) + 3.0 * at(1) - at(2)) / h
                    } else if pos == n[d] {
                        c[d] -= 1;
                        let idx = grid.index(c[0], c[1], c[2]);
                        let at = |o: isize| u.data[neighbor(grid, idx, d, o)];
                        (2.0 * at(0) - 3.0 * at(-1) + at(-2)) / h
                    } else {
                        let idx = grid.index(c[0], c[1], c[2]);
                        (u.data[idx] - u.data[neighbor(grid, idx, d, -1)]) / h
                    };
                    out.normal[d][f] = value;
                }
            }
        }
    }
    Ok(out)
}

/// `(div q)_c = Σ_d (q_{c+½e_d} − q_{c−½e_d}) / dx_d`.
pub fn divergence(grid: &Grid, q: &FaceField) -> Result<ScalarField, FieldError> {
    q.matches(grid)?;
    let dx = grid.dx();
    let mut out = ScalarField::zeros(grid);
    for (idx, [i, j, k]) in grid.cells() {
        let mut acc = 0.0;
        for d in 0..3 {
            let lo = grid.face_index(d, i, j, k);
            let mut c = [i, j, k];
            c[d] += 1;
            let hi = grid.face_index(d, c[0], c[1], c[2]);
            acc += (q.normal[d][hi] - q.normal[d][lo]) / dx[d];
        }
        out.data[idx] = acc;
    }
    Ok(out)
}
