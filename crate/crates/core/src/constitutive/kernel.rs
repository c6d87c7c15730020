//! The momentum map `F(v) = g(|v|) v + R J v`, its Jacobian, and the
//! inverse `X = F⁻¹` computed by globalized Newton iteration.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{ForchheimerLaw, KernelError, RotationSpec};

/// Residual tolerance for `|F(v) - y| <= max(atol, rtol |y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-12 }
    }
}

impl ToleranceSpec {
    pub fn target(&self, y_norm: f64) -> f64 {
        self.atol.max(self.rtol * y_norm)
    }
}

const MAX_NEWTON_ITERS: usize = 100;
const MAX_BACKTRACKS: usize = 40;
const CONTINUATION_STAGES: usize = 8;

fn check_finite(v: &Vector3<f64>) -> Result<(), KernelError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("non-finite input {:?}", v.as_slice())))
    }
}

#[inline]
fn apply_f(law: &ForchheimerLaw, axis: &Vector3<f64>, coriolis: f64, v: &Vector3<f64>) -> Vector3<f64> {
    let g = law.g_unchecked(v.norm());
    v * g + axis.cross(v) * coriolis
}

#[inline]
fn jacobian_unchecked(law: &ForchheimerLaw, j: &Matrix3<f64>, coriolis: f64, v: &Vector3<f64>) -> Matrix3<f64> {
    let s = v.norm();
    let mut m = j * coriolis;
    if s == 0.0 {
        let g0 = law.a0();
        m[(0, 0)] += g0;
        m[(1, 1)] += g0;
        m[(2, 2)] += g0;
        return m;
    }
    let (g, sgp) = law.g_and_sg_prime(s);
    // g'(s) v vᵀ / s = (s g'(s)) v̂ v̂ᵀ
    let vh = v / s;
    m += (vh * vh.transpose()) * sgp;
    m[(0, 0)] += g;
    m[(1, 1)] += g;
    m[(2, 2)] += g;
    m
}

/// Closed-form inverse of a 3×3 matrix via the adjugate.
pub fn inverse3(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let c00 = m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)];
    let c01 = m[(1, 2)] * m[(2, 0)] - m[(1, 0)] * m[(2, 2)];
    let c02 = m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)];
    let det = m[(0, 0)] * c00 + m[(0, 1)] * c01 + m[(0, 2)] * c02;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv_det = 1.0 / det;
    #[rustfmt::skip]
    let adj = Matrix3::new(
        c00,
        m[(0, 2)] * m[(2, 1)] - m[(0, 1)] * m[(2, 2)],
        m[(0, 1)] * m[(1, 2)] - m[(0, 2)] * m[(1, 1)],
        c01,
        m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)],
        m[(0, 2)] * m[(1, 0)] - m[(0, 0)] * m[(1, 2)],
        c02,
        m[(0, 1)] * m[(2, 0)] - m[(0, 0)] * m[(2, 1)],
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
    );
    Some(adj * inv_det)
}

pub fn eval_f(law: &ForchheimerLaw, rot: &RotationSpec, v: &Vector3<f64>) -> Result<Vector3<f64>, KernelError> {
    check_finite(v)?;
    Ok(apply_f(law, &rot.axis(), rot.coriolis(), v))
}

/// `F'(v) = g'(|v|) v vᵀ/|v| + g(|v|) I + R J`, and `g(0) I + R J` at the
/// origin.
///
/// When [`ForchheimerLaw::singular_at_origin`] holds, `F'` is still continuous
/// at the origin but not Lipschitz there.
pub fn jacobian_f(law: &ForchheimerLaw, rot: &RotationSpec, v: &Vector3<f64>) -> Result<Matrix3<f64>, KernelError> {
    check_finite(v)?;
    let (j, _) = rot.matrices();
    Ok(jacobian_unchecked(law, &j, rot.coriolis(), v))
}

/// Diagnostics from one inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub v: Vector3<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub used_continuation: bool,
}

/// Precomputed per-(law, rotation) state for repeated inversions.
#[derive(Debug, Clone)]
pub struct Inverter<'a> {
    law: &'a ForchheimerLaw,
    axis: Vector3<f64>,
    j: Matrix3<f64>,
    coriolis: f64,
    tol: ToleranceSpec,
}

enum NewtonOutcome {
    Converged { v: Vector3<f64>, residual: f64, iterations: usize },
    Failed { residual: f64 },
}

impl<'a> Inverter<'a> {
    pub fn new(law: &'a ForchheimerLaw, rot: &RotationSpec, tol: ToleranceSpec) -> Self {
        let (j, _) = rot.matrices();
        Self { law, axis: rot.axis(), j, coriolis: rot.coriolis(), tol }
    }

    pub fn law(&self) -> &ForchheimerLaw {
        self.law
    }

    /// Starting point `h ŷ` with `g(h) h = |y|`; exact when `R = 0`.
    pub fn initial_guess(&self, y: &Vector3<f64>) -> Vector3<f64> {
        let r = y.norm();
        if r == 0.0 {
            return Vector3::zeros();
        }
        y * (self.law.solve_magnitude(r) / r)
    }

    fn newton(&self, y: &Vector3<f64>, coriolis: f64, mut v: Vector3<f64>, target: f64) -> NewtonOutcome {
        let mut r = apply_f(self.law, &self.axis, coriolis, &v) - y;
        let mut rn = r.norm();
        for it in 0..MAX_NEWTON_ITERS {
            if rn <= target {
                return NewtonOutcome::Converged { v, residual: rn, iterations: it };
            }
            let jac = jacobian_unchecked(self.law, &self.j, coriolis, &v);
            let Some(inv) = inverse3(&jac) else {
                return NewtonOutcome::Failed { residual: rn };
            };
            let delta = -(inv * r);
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_BACKTRACKS {
                let trial = v + delta * lambda;
                let tr = apply_f(self.law, &self.axis, coriolis, &trial) - y;
                let trn = tr.norm();
                if trn < rn {
                    v = trial;
                    r = tr;
                    rn = trn;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                return NewtonOutcome::Failed { residual: rn };
            }
        }
        if rn <= target {
            NewtonOutcome::Converged { v, residual: rn, iterations: MAX_NEWTON_ITERS }
        } else {
            NewtonOutcome::Failed { residual: rn }
        }
    }

    /// Solves `F(v) = y`.
    pub fn solve(&self, y: &Vector3<f64>) -> Result<Inversion, KernelError> {
        check_finite(y)?;
        let yn = y.norm();
        if yn == 0.0 {
            return Ok(Inversion { v: Vector3::zeros(), residual: 0.0, iterations: 0, used_continuation: false });
        }
        let target = self.tol.target(yn);
        let v0 = self.initial_guess(y);
        match self.newton(y, self.coriolis, v0, target) {
            NewtonOutcome::Converged { v, residual, iterations } => {
                return Ok(Inversion { v, residual, iterations, used_continuation: false });
            }
            NewtonOutcome::Failed { .. } => {}
        }
        // continuation in R from the exactly solvable R = 0 problem
        let mut v = v0;
        let mut total = 0;
        for stage in 1..=CONTINUATION_STAGES {
            let c = self.coriolis * stage as f64 / CONTINUATION_STAGES as f64;
            match self.newton(y, c, v, target) {
                NewtonOutcome::Converged { v: next, iterations, .. } => {
                    v = next;
                    total += iterations;
                }
                NewtonOutcome::Failed { residual, .. } => {
                    return Err(KernelError::NoConvergence { residual, target });
                }
            }
        }
        let residual = (apply_f(self.law, &self.axis, self.coriolis, &v) - y).norm();
        Ok(Inversion { v, residual, iterations: total, used_continuation: true })
    }

    /// Solves `F(v) = y` starting Newton from `guess`; falls back to
    /// [`Inverter::solve`] when that start does not converge.
    pub fn solve_from(&self, y: &Vector3<f64>, guess: &Vector3<f64>) -> Result<Inversion, KernelError> {
        check_finite(y)?;
        let yn = y.norm();
        if yn == 0.0 || !guess.iter().all(|c| c.is_finite()) {
            return self.solve(y);
        }
        match self.newton(y, self.coriolis, *guess, self.tol.target(yn)) {
            NewtonOutcome::Converged { v, residual, iterations } => {
                Ok(Inversion { v, residual, iterations, used_continuation: false })
            }
            NewtonOutcome::Failed { .. } => self.solve(y),
        }
    }

    /// `F'(v)` for this law and rotation.
    pub fn jacobian_at(&self, v: &Vector3<f64>) -> Matrix3<f64> {
        jacobian_unchecked(self.law, &self.j, self.coriolis, v)
    }

    /// `F(v)` for this law and rotation.
    pub fn forward(&self, v: &Vector3<f64>) -> Vector3<f64> {
        apply_f(self.law, &self.axis, self.coriolis, v)
    }

    /// `X(y)` together with `X'(y)`.
    pub fn solve_with_jacobian(&self, y: &Vector3<f64>) -> Result<(Inversion, Matrix3<f64>), KernelError> {
        let inv = self.solve(y)?;
        let m = inverse3(&self.jacobian_at(&inv.v)).ok_or(KernelError::SingularJacobian)?;
        Ok((inv, m))
    }

    /// `X'(y) = F'(X(y))⁻¹`.
    pub fn jacobian_inverse(&self, y: &Vector3<f64>) -> Result<Matrix3<f64>, KernelError> {
        let inv = self.solve(y)?;
        let jac = jacobian_unchecked(self.law, &self.j, self.coriolis, &inv.v);
        inverse3(&jac).ok_or(KernelError::SingularJacobian)
    }
}

/// `X(y) = F⁻¹(y)`.
pub fn invert_f(
    law: &ForchheimerLaw,
    rot: &RotationSpec,
    y: &Vector3<f64>,
    tol: ToleranceSpec,
) -> Result<Vector3<f64>, KernelError> {
    Inverter::new(law, rot, tol).solve(y).map(|inv| inv.v)
}

/// `X'(y)`, by closed-form inversion of `F'` at `X(y)`.
pub fn jacobian_x(law: &ForchheimerLaw, rot: &RotationSpec, y: &Vector3<f64>) -> Result<Matrix3<f64>, KernelError> {
    Inverter::new(law, rot, ToleranceSpec::default()).jacobian_inverse(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> ForchheimerLaw {
        ForchheimerLaw::two_term(1.0, 1.0).unwrap()
    }

    fn close(a: &Vector3<f64>, b: &Vector3<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn f_examples() {
        let law = simple();
        let x = Vector3::new(1.0, 0.0, 0.0);
        let no_rot = RotationSpec::vertical(0.0).unwrap();
        assert_eq!(eval_f(&law, &no_rot, &x).unwrap(), Vector3::new(2.0, 0.0, 0.0));
        let rot = RotationSpec::vertical(1.0).unwrap();
        assert_eq!(eval_f(&law, &rot, &x).unwrap(), Vector3::new(2.0, 1.0, 0.0));
        assert_eq!(eval_f(&law, &rot, &Vector3::zeros()).unwrap(), Vector3::zeros());
        assert!(eval_f(&law, &rot, &Vector3::new(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let law = simple();
        let no_rot = RotationSpec::vertical(0.0).unwrap();
        let m = jacobian_f(&law, &no_rot, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(m, Matrix3::from_diagonal(&Vector3::new(3.0, 2.0, 2.0)));
        let rot = RotationSpec::vertical(1.0).unwrap();
        let (j, _) = rot.matrices();
        let m0 = jacobian_f(&law, &rot, &Vector3::zeros()).unwrap();
        assert_eq!(m0, Matrix3::identity() * law.a0() + j);
    }

    #[test]
    fn inverse_examples() {
        let law = simple();
        let rot = RotationSpec::vertical(1.0).unwrap();
        let tol = ToleranceSpec::default();
        let v = invert_f(&law, &rot, &Vector3::new(2.0, 1.0, 0.0), tol).unwrap();
        assert!(close(&v, &Vector3::new(1.0, 0.0, 0.0), 1e-12));
        assert_eq!(invert_f(&law, &rot, &Vector3::zeros(), tol).unwrap(), Vector3::zeros());
        let y = Vector3::new(0.3, -2.0, 5.0);
        let a = invert_f(&law, &rot, &y, tol).unwrap();
        let b = invert_f(&law, &rot, &(-y), tol).unwrap();
        assert!(close(&a, &(-b), 1e-12));
    }

    #[test]
    fn x_jacobian_examples() {
        let law = simple();
        let no_rot = RotationSpec::vertical(0.0).unwrap();
        assert_eq!(jacobian_x(&law, &no_rot, &Vector3::zeros()).unwrap(), Matrix3::identity());
        let m = jacobian_x(&law, &no_rot, &Vector3::new(2.0, 0.0, 0.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0 / 3.0, 0.5, 0.5));
        assert!((m - expected).norm() < 1e-14);
    }

    #[test]
    fn inverse3_matches_nalgebra() {
        let m = Matrix3::new(2.0, 0.3, -1.0, 0.5, 4.0, 0.2, -0.7, 0.1, 3.0);
        let ours = inverse3(&m).unwrap();
        let theirs = m.try_inverse().unwrap();
        assert!((ours - theirs).norm() < 1e-14);
        assert!(inverse3(&Matrix3::zeros()).is_none());
    }

    #[test]
    fn continuation_stage_reaches_the_root() {
        // exercise the fallback path directly; it must agree with plain Newton
        let law = ForchheimerLaw::new(vec![0.05, 1.0, 0.5], vec![0.3, 4.0]).unwrap();
        let rot = RotationSpec::from_direction([1.0, 2.0, -0.5], 10.0).unwrap();
        let inv = Inverter::new(&law, &rot, ToleranceSpec::default());
        let y = Vector3::new(40.0, -3.0, 17.0);
        let direct = inv.solve(&y).unwrap();
        let mut v = inv.initial_guess(&y);
        for stage in 1..=CONTINUATION_STAGES {
            let c = rot.coriolis() * stage as f64 / CONTINUATION_STAGES as f64;
            match inv.newton(&y, c, v, 1e-12 * y.norm()) {
                NewtonOutcome::Converged { v: next, .. } => v = next,
                NewtonOutcome::Failed { .. } => panic!("continuation stage {stage} failed"),
            }
        }
        assert!(close(&v, &direct.v, 1e-10 * (1.0 + v.norm())));
    }
}
