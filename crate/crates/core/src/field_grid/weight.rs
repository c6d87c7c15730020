use nalgebra::Vector3;

use super::{cell_phi, gradient, EnvironmentParams, FieldError, Grid, ScalarField, VecField};
use crate::constitutive::BoundReport;

/// `K = (1 + |Φ|)^{-a}` cellwise.
pub fn weight_from_phi(phi: &VecField, a: f64) -> Vec<f64> {
    phi.data.iter().map(|p| (1.0 + p.norm()).powf(-a)).collect()
}

/// `K = (1 + |∇u + u² Z|)^{-a}` on the cells of `grid`.
pub fn weight_k(grid: &Grid, env: &EnvironmentParams, u: &ScalarField, t: f64, a: f64) -> Result<ScalarField, FieldError> {
    let phi = cell_phi(grid, env, u, t)?;
    ScalarField::from_vec(grid, weight_from_phi(&phi, a))
}

/// The three pointwise weight inequalities, for `K = (1 + |∇w + w² Q|)^{-a}`:
/// `kug1`: `K|∇w|^s <= 2^{2s-a}|∇w|^{s-a} + 2^{2s+1-a}(1 + |w²Q|^s)`,
/// `kug2`: `K|∇w|^s >= |∇w|^{s-a}/3 - (1 + |w²Q|^s)/3`,
/// `kugs`: `|∇w|^s <= 3K|∇w|^{s+a} + 1 + |w²Q|^{s+a}`.
pub fn kug_verify(
    grid: &Grid,
    w: &ScalarField,
    q: &VecField,
    a: f64,
    s: f64,
    tol: f64,
) -> Result<BoundReport, FieldError> {
    q.matches(grid)?;
    if !(s >= a) {
        return Err(FieldError::Precondition(format!("weight inequalities need s >= a, got s = {s}, a = {a}")));
    }
    let grad = gradient(grid, w)?;
    let mut report = BoundReport::new();
    for (idx, gw) in grad.data.iter().enumerate() {
        report.samples_checked += 1;
        let x = grid.center_of(idx);
        let p = [x.x, x.y, x.z];
        let wq: Vector3<f64> = q.data[idx] * (w.data[idx] * w.data[idx]);
        let g = gw.norm();
        let m = wq.norm();
        let k = (1.0 + (gw + wq).norm()).powf(-a);
        let gs = g.powf(s);
        let gsa = g.powf(s - a);

        let rhs1 = 2f64.powf(2.0 * s - a) * gsa + 2f64.powf(2.0 * s + 1.0 - a) * (1.0 + m.powf(s));
        report.record("kug1", p, k * gs, rhs1, rhs1.max(1.0), tol);

        let lhs2 = (gsa - (1.0 + m.powf(s))) / 3.0;
        report.record("kug2", p, lhs2, k * gs, (k * gs).max(lhs2.abs()).max(1.0), tol);

        let rhs3 = 3.0 * k * g.powf(s + a) + 1.0 + m.powf(s + a);
        report.record("kugs", p, gs, rhs3, rhs3, tol);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::RotationSpec;

    #[test]
    fn weight_examples() {
        let grid = Grid::unit_cube(4).unwrap();
        let env = EnvironmentParams::quiescent(1.0, 1.0).unwrap();
        let k = weight_k(&grid, &env, &ScalarField::constant(&grid, 3.0), 0.0, 0.5).unwrap();
        assert!(k.data.iter().all(|&v| v == 1.0));
        let mut phi = VecField::zeros(&grid);
        phi.data[0] = Vector3::new(0.0, 1.0, 0.0);
        let w = weight_from_phi(&phi, 0.5);
        assert_eq!(w[0], 0.5f64.sqrt());
    }

    #[test]
    fn weight_lies_in_unit_interval() {
        let grid = Grid::unit_cube(6).unwrap();
        let env = EnvironmentParams::new(1.0, 2.0, 1.0, 0.5, 0.0, RotationSpec::vertical(0.0).unwrap()).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 1.0 + x.x * x.y - x.z);
        let k = weight_k(&grid, &env, &u, 0.3, 0.6).unwrap();
        assert!(k.data.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn weight_inequalities_on_a_smooth_field() {
        let grid = Grid::unit_cube(8).unwrap();
        let w = ScalarField::from_fn(&grid, |x| (3.0 * x.x).sin() * 4.0 + x.y * x.z * 10.0);
        let q = VecField::from_fn(&grid, |x| Vector3::new(x.y, -2.0 * x.z, 0.5));
        for s in [0.5, 1.0, 2.0, 4.0] {
            let r = kug_verify(&grid, &w, &q, 0.5, s, 1e-12).unwrap();
            assert!(r.is_clean(), "s={s}: {:?}", r.violations.first());
        }
        assert!(kug_verify(&grid, &w, &q, 0.5, 0.25, 1e-12).is_err());
    }
}
