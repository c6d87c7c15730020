use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{FieldError, Grid};

/// Cell-centered scalar values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    n: [usize; 3],
    pub data: Vec<f64>,
}

/// Cell-centered vector values.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField {
    n: [usize; 3],
    pub data: Vec<Vector3<f64>>,
}

/// One scalar per face, grouped by face normal.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    n: [usize; 3],
    pub normal: [Vec<f64>; 3],
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { n: grid.n(), data: vec![0.0; grid.num_cells()] }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { n: grid.n(), data: vec![c; grid.num_cells()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&Vector3<f64>) -> f64) -> Self {
        let data = (0..grid.num_cells()).map(|idx| f(&grid.center_of(idx))).collect();
        Self { n: grid.n(), data }
    }

    pub fn from_vec(grid: &Grid, data: Vec<f64>) -> Result<Self, FieldError> {
        if data.len() != grid.num_cells() {
            return Err(FieldError::ShapeMismatch { expected: grid.num_cells(), got: data.len() });
        }
        Ok(Self { n: grid.n(), data })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn matches(&self, grid: &Grid) -> Result<(), FieldError> {
        if self.n != grid.n() || self.data.len() != grid.num_cells() {
            return Err(FieldError::ShapeMismatch { expected: grid.num_cells(), got: self.data.len() });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Midpoint-rule `∫ v² dx`.
    pub fn l2_norm_squared(&self, grid: &Grid) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>() * grid.cell_volume()
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ScalarField { n: self.n, data }
    }
}

impl VecField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { n: grid.n(), data: vec![Vector3::zeros(); grid.num_cells()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Self {
        let data = (0..grid.num_cells()).map(|idx| f(&grid.center_of(idx))).collect();
        Self { n: grid.n(), data }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn matches(&self, grid: &Grid) -> Result<(), FieldError> {
        if self.n != grid.n() || self.data.len() != grid.num_cells() {
            return Err(FieldError::ShapeMismatch { expected: grid.num_cells(), got: self.data.len() });
        }
        Ok(())
    }

    pub fn norms(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.norm()).collect()
    }
}

impl FaceField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { n: grid.n(), normal: [0, 1, 2].map(|d| vec![0.0; grid.num_faces(d)]) }
    }

    pub fn constant(grid: &Grid, c: [f64; 3]) -> Self {
        Self { n: grid.n(), normal: [0, 1, 2].map(|d| vec![c[d]; grid.num_faces(d)]) }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn matches(&self, grid: &Grid) -> Result<(), FieldError> {
        for d in 0..3 {
            if self.n != grid.n() || self.normal[d].len() != grid.num_faces(d) {
                return Err(FieldError::ShapeMismatch { expected: grid.num_faces(d), got: self.normal[d].len() });
            }
        }
        Ok(())
    }
}
