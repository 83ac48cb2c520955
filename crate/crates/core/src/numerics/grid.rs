use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform tensor grid on `[-x_max, x_max] x [0, 1]`.
///
/// Nodes are indexed `0..n_x` in space and `0..=n_t` in time. `n_x` is odd so
/// that `x = 0` is the node `n_x / 2`. Flux values live on the `n_x - 1` faces
/// between neighbouring nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    x_max: f64,
    n_x: usize,
    n_t: usize,
    dx: f64,
    dt: f64,
}

impl SpaceTimeGrid {
    pub fn new(x_max: f64, n_x: usize, n_t: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        if n_x < 3 {
            return Err(Error::InvalidGrid(format!(
                "n_x must be at least 3, got {n_x}"
            )));
        }
        if n_x % 2 == 0 {
            return Err(Error::InvalidGrid(format!("n_x must be odd, got {n_x}")));
        }
        if n_t < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_t must be at least 2, got {n_t}"
            )));
        }
        Ok(Self {
            x_max,
            n_x,
            n_t,
            dx: 2.0 * x_max / (n_x - 1) as f64,
            dt: 1.0 / n_t as f64,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn x_min(&self) -> f64 {
        -self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_faces(&self) -> usize {
        self.n_x - 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        self.n_x / 2
    }

    /// Position of node `i`, computed from the centre so that `x(i) == -x(n_x - 1 - i)`
    /// holds bit for bit.
    pub fn x(&self, i: usize) -> f64 {
        let c = self.center();
        if i >= c {
            (i - c) as f64 * self.dx
        } else {
            -((c - i) as f64 * self.dx)
        }
    }

    /// Position of the face between nodes `i` and `i + 1`.
    pub fn face_x(&self, i: usize) -> f64 {
        0.5 * (self.x(i) + self.x(i + 1))
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    pub fn face_xs(&self) -> Vec<f64> {
        (0..self.n_faces()).map(|i| self.face_x(i)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..=self.n_t).map(|n| self.t(n)).collect()
    }

    /// Index of the time slice nearest to `t`.
    pub fn nearest_slice(&self, t: f64) -> usize {
        ((t / self.dt).round().max(0.0) as usize).min(self.n_t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_coordinates() {
        let g = SpaceTimeGrid::new(3.0, 5, 4).unwrap();
        assert_eq!(g.dx(), 1.5);
        assert_eq!(g.dt(), 0.25);
        assert_eq!(g.xs(), vec![-3.0, -1.5, 0.0, 1.5, 3.0]);
        assert_eq!(g.center(), 2);
    }

    #[test]
    fn baseline_spacing() {
        let g = SpaceTimeGrid::new(3.0, 401, 400).unwrap();
        assert!((g.dx() - 0.015).abs() < 1e-15);
        assert!((g.dt() - 0.0025).abs() < 1e-15);
        assert_eq!(g.x(200), 0.0);
        assert_eq!(g.x(0), -3.0);
        assert_eq!(g.x(400), 3.0);
    }

    #[test]
    fn rejects_even_and_degenerate_sizes() {
        let err = SpaceTimeGrid::new(3.0, 4, 4).unwrap_err();
        assert!(err.to_string().contains("n_x must be odd"));
        assert!(SpaceTimeGrid::new(3.0, 1, 4).is_err());
        assert!(SpaceTimeGrid::new(3.0, 5, 1).is_err());
        assert!(SpaceTimeGrid::new(0.0, 5, 4).is_err());
        assert!(SpaceTimeGrid::new(-1.0, 5, 4).is_err());
    }

    #[test]
    fn nodes_are_mirror_symmetric() {
        let g = SpaceTimeGrid::new(3.0, 401, 10).unwrap();
        for i in 0..g.n_x() {
            assert_eq!(g.x(i), -g.x(g.n_x() - 1 - i));
        }
    }
}
