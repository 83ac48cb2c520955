use ndarray::{Array2, ArrayView1, ArrayViewMut1};
use serde::{Deserialize, Serialize};

use super::SpaceTimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Density,
    ValueFunction,
}

/// Nodal values on every time slice: `values[[n, i]]` is the value at `(x_i, t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Array2<f64>,
    pub quantity: Quantity,
}

impl ScalarField {
    pub fn zeros(grid: &SpaceTimeGrid, quantity: Quantity) -> Self {
        Self {
            values: Array2::zeros((grid.n_t() + 1, grid.n_x())),
            quantity,
        }
    }

    /// Samples `f(x, t)` at every node.
    pub fn from_fn(
        grid: &SpaceTimeGrid,
        quantity: Quantity,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let values = Array2::from_shape_fn((grid.n_t() + 1, grid.n_x()), |(n, i)| {
            f(grid.x(i), grid.t(n))
        });
        Self { values, quantity }
    }

    pub fn n_slices(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_x(&self) -> usize {
        self.values.ncols()
    }

    pub fn slice(&self, n: usize) -> ArrayView1<'_, f64> {
        self.values.row(n)
    }

    pub fn slice_mut(&mut self, n: usize) -> ArrayViewMut1<'_, f64> {
        self.values.row_mut(n)
    }

    pub fn fits(&self, grid: &SpaceTimeGrid) -> bool {
        self.values.dim() == (grid.n_t() + 1, grid.n_x())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation from evenness in `x` over all slices.
    pub fn asymmetry(&self) -> f64 {
        let n_x = self.n_x();
        let mut worst = 0.0_f64;
        for row in self.values.rows() {
            for i in 0..n_x / 2 {
                worst = worst.max((row[i] - row[n_x - 1 - i]).abs());
            }
        }
        worst
    }
}

/// Staggered values: `values[[n, i]]` sits on the face between nodes `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    pub values: Array2<f64>,
}

impl FluxField {
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        Self {
            values: Array2::zeros((grid.n_t() + 1, grid.n_faces())),
        }
    }

    pub fn from_fn(grid: &SpaceTimeGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((grid.n_t() + 1, grid.n_faces()), |(n, i)| {
            f(grid.face_x(i), grid.t(n))
        });
        Self { values }
    }

    pub fn slice(&self, n: usize) -> ArrayView1<'_, f64> {
        self.values.row(n)
    }

    pub fn fits(&self, grid: &SpaceTimeGrid) -> bool {
        self.values.dim() == (grid.n_t() + 1, grid.n_faces())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
