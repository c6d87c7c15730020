use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::FieldError;

/// Uniform cell-centered grid on an axis-aligned box. Cells are stored with
/// the first index varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: [f64; 3],
    hi: [f64; 3],
    n: [usize; 3],
}

pub const MIN_CELLS: usize = 4;

impl Grid {
    pub fn new(lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> Result<Self, FieldError> {
        for d in 0..3 {
            if !(lo[d].is_finite() && hi[d].is_finite() && hi[d] > lo[d]) {
                return Err(FieldError::InvalidGrid(format!("axis {d}: need lo < hi, got [{}, {}]", lo[d], hi[d])));
            }
            if n[d] < MIN_CELLS {
                return Err(FieldError::InvalidGrid(format!("axis {d}: need at least {MIN_CELLS} cells, got {}", n[d])));
            }
        }
        Ok(Self { lo, hi, n })
    }

    pub fn unit_cube(n: usize) -> Result<Self, FieldError> {
        Self::new([0.0; 3], [1.0; 3], [n; 3])
    }

    pub fn lo(&self) -> [f64; 3] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 3] {
        self.hi
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn dx(&self) -> [f64; 3] {
        [0, 1, 2].map(|d| (self.hi[d] - self.lo[d]) / self.n[d] as f64)
    }

    pub fn min_dx(&self) -> f64 {
        let dx = self.dx();
        dx[0].min(dx[1]).min(dx[2])
    }

    pub fn max_dx(&self) -> f64 {
        let dx = self.dx();
        dx[0].max(dx[1]).max(dx[2])
    }

    pub fn cell_volume(&self) -> f64 {
        let dx = self.dx();
        dx[0] * dx[1] * dx[2]
    }

    pub fn num_cells(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let j = (idx / self.n[0]) % self.n[1];
        let k = idx / (self.n[0] * self.n[1]);
        [i, j, k]
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        let dx = self.dx();
        Vector3::new(
            self.lo[0] + (i as f64 + 0.5) * dx[0],
            self.lo[1] + (j as f64 + 0.5) * dx[1],
            self.lo[2] + (k as f64 + 0.5) * dx[2],
        )
    }

    pub fn center_of(&self, idx: usize) -> Vector3<f64> {
        let [i, j, k] = self.coords(idx);
        self.cell_center(i, j, k)
    }

    /// Number of faces normal to axis `d`.
    pub fn num_faces(&self, d: usize) -> usize {
        let mut m = self.n;
        m[d] += 1;
        m[0] * m[1] * m[2]
    }

    /// Index of the face normal to axis `d` with lower-left corner
    /// `(i, j, k)`; the `d` coordinate ranges over `0..=n[d]`.
    #[inline]
    pub fn face_index(&self, d: usize, i: usize, j: usize, k: usize) -> usize {
        let mut m = self.n;
        m[d] += 1;
        i + m[0] * (j + m[1] * k)
    }

    pub fn face_center(&self, d: usize, i: usize, j: usize, k: usize) -> Vector3<f64> {
        let mut c = self.cell_center(i, j, k);
        c[d] = self.lo[d] + [i, j, k][d] as f64 * self.dx()[d];
        c
    }

    /// Area of a face normal to axis `d`.
    pub fn face_area(&self, d: usize) -> f64 {
        self.cell_volume() / self.dx()[d]
    }

    /// Box corners.
    pub fn corners(&self) -> [Vector3<f64>; 8] {
        let mut out = [Vector3::zeros(); 8];
        for (c, slot) in out.iter_mut().enumerate() {
            for d in 0..3 {
                slot[d] = if c >> d & 1 == 0 { self.lo[d] } else { self.hi[d] };
            }
        }
        out
    }

    /// Whether `x` lies in the closed box.
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        (0..3).all(|d| x[d] >= self.lo[d] && x[d] <= self.hi[d])
    }

    /// Iterates over cell indices with their coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (usize, [usize; 3])> + '_ {
        (0..self.num_cells()).map(move |idx| (idx, self.coords(idx)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_roundtrip() {
        let g = Grid::new([0.0, -1.0, 2.0], [1.0, 1.0, 3.0], [4, 5, 6]).unwrap();
        for idx in 0..g.num_cells() {
            let [i, j, k] = g.coords(idx);
            assert_eq!(g.index(i, j, k), idx);
            assert!(g.contains(&g.cell_center(i, j, k)));
        }
        assert_eq!(g.num_faces(0), 5 * 5 * 6);
        assert_eq!(g.dx(), [0.25, 0.4, 1.0 / 6.0]);
        assert!((g.face_area(0) * g.dx()[0] - g.cell_volume()).abs() < 1e-15);
    }

    #[test]
    fn centers_are_strictly_interior() {
        let g = Grid::unit_cube(4).unwrap();
        let c = g.cell_center(0, 0, 0);
        assert_eq!(c, Vector3::new(0.125, 0.125, 0.125));
        assert_eq!(g.face_center(0, 0, 1, 2).x, 0.0);
        assert_eq!(g.face_center(0, 4, 1, 2).x, 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new([0.0; 3], [1.0; 3], [3, 4, 4]).is_err());
        assert!(Grid::new([0.0; 3], [0.0, 1.0, 1.0], [4, 4, 4]).is_err());
    }
}
