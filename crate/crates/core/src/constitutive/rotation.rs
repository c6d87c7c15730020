use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::KernelError;

/// Rotation axis `k` (unit vector) and Coriolis coefficient `R >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    axis: [f64; 3],
    coriolis: f64,
}

impl RotationSpec {
    pub const AXIS_TOLERANCE: f64 = 1e-14;

    pub fn new(axis: [f64; 3], coriolis: f64) -> Result<Self, KernelError> {
        let norm = Vector3::from(axis).norm();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::AXIS_TOLERANCE {
            return Err(KernelError::InvalidRotation(format!("axis must be a unit vector, |k| = {norm}")));
        }
        if !(coriolis >= 0.0) || !coriolis.is_finite() {
            return Err(KernelError::InvalidRotation(format!("Coriolis coefficient must be >= 0, got {coriolis}")));
        }
        Ok(Self { axis, coriolis })
    }

    /// Normalizes `axis` before validation.
    pub fn from_direction(axis: [f64; 3], coriolis: f64) -> Result<Self, KernelError> {
        let v = Vector3::from(axis);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(KernelError::InvalidRotation("axis direction must be nonzero".into()));
        }
        let u = v / n;
        Self::new([u.x, u.y, u.z], coriolis)
    }

    /// Rotation about the vertical axis `(0, 0, 1)`.
    pub fn vertical(coriolis: f64) -> Result<Self, KernelError> {
        Self::new([0.0, 0.0, 1.0], coriolis)
    }

    pub fn axis(&self) -> Vector3<f64> {
        Vector3::from(self.axis)
    }

    pub fn coriolis(&self) -> f64 {
        self.coriolis
    }

    pub fn with_coriolis(&self, coriolis: f64) -> Result<Self, KernelError> {
        Self::new(self.axis, coriolis)
    }

    /// `k = ±e3`, for which the centrifugal term only sees the planar radius.
    pub fn is_vertical(&self) -> bool {
        self.axis[0] == 0.0 && self.axis[1] == 0.0 && self.axis[2].abs() == 1.0
    }

    /// The matrix `J` of `x ↦ k × x` and its square.
    pub fn matrices(&self) -> (Matrix3<f64>, Matrix3<f64>) {
        let [k1, k2, k3] = self.axis;
        #[rustfmt::skip]
        let j = Matrix3::new(
            0.0, -k3,  k2,
             k3, 0.0, -k1,
            -k2,  k1, 0.0,
        );
        #[rustfmt::skip]
        let j2 = Matrix3::new(
            k1 * k1 - 1.0, k1 * k2,       k1 * k3,
            k1 * k2,       k2 * k2 - 1.0, k2 * k3,
            k1 * k3,       k2 * k3,       k3 * k3 - 1.0,
        );
        (j, j2)
    }
}

pub fn rotation_matrices(rot: &RotationSpec) -> (Matrix3<f64>, Matrix3<f64>) {
    rot.matrices()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_axis_matrix() {
        let rot = RotationSpec::vertical(0.0).unwrap();
        let (j, j2) = rot.matrices();
        assert_eq!(j, Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(j.norm_squared(), 2.0);
        assert_eq!(j2 * Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 0.0, 0.0));
        assert!(rot.is_vertical());
    }

    #[test]
    fn generic_axis_identities() {
        let rot = RotationSpec::from_direction([0.3, -1.2, 0.7], 2.0).unwrap();
        let (j, j2) = rot.matrices();
        let k = rot.axis();
        assert!((j + j.transpose()).norm() == 0.0);
        assert!((j * j - j2).norm() < 1e-15);
        assert!((j.norm_squared() - 2.0).abs() < 1e-14);
        assert!((j2.norm_squared() - 2.0).abs() < 1e-14);
        for x in [Vector3::new(1.0, 2.0, 3.0), Vector3::new(-0.5, 0.1, 4.0)] {
            assert!((j * x - k.cross(&x)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_unit_axis() {
        assert!(RotationSpec::new([1.0, 1.0, 0.0], 0.0).is_err());
        assert!(RotationSpec::new([0.0, 0.0, 1.0], -1.0).is_err());
    }
}
