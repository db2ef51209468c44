//! Uniform 1D staggered mesh.
//!
//! Cells `0..n` carry scalars, faces `0..=n` carry the velocity. Face `j`
//! separates cells `j-1` and `j`; faces `0` and `n` lie on the boundary.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct StaggeredGrid {
    pub n_cells: usize,
    pub x_left: f64,
    pub x_right: f64,
    pub h: f64,
    pub cell_centers: Vec<f64>,
    pub face_positions: Vec<f64>,
    /// |D_sigma| per face, half a cell on the boundary.
    pub dual_volume: Vec<f64>,
    pub boundary: Vec<bool>,
}

pub fn build_uniform_grid(n_cells: usize, x_left: f64, x_right: f64) -> Result<StaggeredGrid> {
    if n_cells < 3 {
        return Err(Error::Config(format!("n_cells = {n_cells}, at least 3 required")));
    }
    if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
        return Err(Error::Config(format!("bad domain ({x_left}, {x_right})")));
    }
    let len = x_right - x_left;
    let h = len / n_cells as f64;
    let face_positions: Vec<f64> = (0..=n_cells)
        .map(|j| if j == n_cells { x_right } else { x_left + len * j as f64 / n_cells as f64 })
        .collect();
    let cell_centers = (0..n_cells)
        .map(|k| 0.5 * (face_positions[k] + face_positions[k + 1]))
        .collect();
    let mut dual_volume = vec![h; n_cells + 1];
    dual_volume[0] = 0.5 * h;
    dual_volume[n_cells] = 0.5 * h;
    let mut boundary = vec![false; n_cells + 1];
    boundary[0] = true;
    boundary[n_cells] = true;
    Ok(StaggeredGrid { n_cells, x_left, x_right, h, cell_centers, face_positions, dual_volume, boundary })
}

impl StaggeredGrid {
    pub fn n_faces(&self) -> usize {
        self.n_cells + 1
    }

    pub fn cell_volume(&self, _k: usize) -> f64 {
        self.h
    }

    pub fn face(&self, k: usize, side: Side) -> usize {
        match side {
            Side::Left => k,
            Side::Right => k + 1,
        }
    }

    /// Outward normal of `k` on face `j` (+1 right, -1 left).
    pub fn normal(&self, k: usize, j: usize) -> f64 {
        if j == k + 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Cells on either side of face `j`; `None` outside the domain.
    pub fn face_cells(&self, j: usize) -> (Option<usize>, Option<usize>) {
        let left = if j == 0 { None } else { Some(j - 1) };
        let right = if j >= self.n_cells { None } else { Some(j) };
        (left, right)
    }

    pub fn is_interior_face(&self, j: usize) -> bool {
        j > 0 && j < self.n_cells
    }

    pub fn opposite_face(&self, k: usize, j: usize) -> Result<usize> {
        if k >= self.n_cells {
            return Err(Error::State(format!("cell {k} out of range")));
        }
        if j == k {
            Ok(k + 1)
        } else if j == k + 1 {
            Ok(k)
        } else {
            Err(Error::State(format!("face {j} is not a face of cell {k}")))
        }
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cells() {
        let g = build_uniform_grid(3, 0.0, 3.0).unwrap();
        assert_eq!(g.face_positions, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(g.h, 1.0);
        assert_eq!(&g.dual_volume[1..3], &[1.0, 1.0]);
        assert_eq!(g.dual_volume[0], 0.5);
    }

    #[test]
    fn benchmark_spacing() {
        let g = build_uniform_grid(250, 0.0, 4.5).unwrap();
        assert_eq!(g.h, 4.5 / 250.0);
    }

    #[test]
    fn too_small() {
        assert!(build_uniform_grid(2, 0.0, 1.0).is_err());
        assert!(build_uniform_grid(5, 1.0, 1.0).is_err());
    }

    #[test]
    fn opposite() {
        let g = build_uniform_grid(10, 0.0, 1.0).unwrap();
        assert_eq!(g.opposite_face(5, 6).unwrap(), 5);
        assert_eq!(g.opposite_face(0, 1).unwrap(), 0);
        assert!(g.boundary[g.opposite_face(0, 1).unwrap()]);
        assert!(g.opposite_face(5, 8).is_err());
        for k in 0..10 {
            for j in [k, k + 1] {
                let o = g.opposite_face(k, j).unwrap();
                assert_eq!(g.opposite_face(k, o).unwrap(), j);
            }
        }
    }
}
