use serde::{Deserialize, Serialize};

use super::SpaceTimeGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MollifierKind {
    Gaussian,
    Triangle,
}

/// Grid stand-in for the unit point mass at `x = 0`.
///
/// For the gaussian kind `width` is the standard deviation. For the triangle
/// kind the hat `(1 - |x| / (2 width))_+` is used, so `width = dx` yields the
/// three-point stencil `(1/4, 1/2, 1/4) / dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifiedDirac {
    pub width: f64,
    pub kind: MollifierKind,
}

impl MollifiedDirac {
    pub fn gaussian(width: f64) -> Self {
        Self {
            width,
            kind: MollifierKind::Gaussian,
        }
    }

    pub fn triangle(width: f64) -> Self {
        Self {
            width,
            kind: MollifierKind::Triangle,
        }
    }

    /// Gaussian of width `multiple * dx`.
    pub fn grid_gaussian(grid: &SpaceTimeGrid, multiple: f64) -> Self {
        Self::gaussian(multiple * grid.dx())
    }

    fn profile(&self, x: f64) -> f64 {
        match self.kind {
            MollifierKind::Gaussian => {
                let z = x / self.width;
                (-0.5 * z * z).exp()
            }
            MollifierKind::Triangle => (1.0 - x.abs() / (2.0 * self.width)).max(0.0),
        }
    }
}

/// Samples the mollifier on the grid nodes and renormalizes so that
/// `dx * sum = 1`.
pub fn dirac_slice(grid: &SpaceTimeGrid, d: &MollifiedDirac) -> Result<Vec<f64>> {
    // small relative slack so that `width = k * dx` passes for k = 1
    if !(d.width.is_finite() && d.width >= grid.dx() * (1.0 - 1e-12)) {
        return Err(Error::UnderResolved {
            width: d.width,
            dx: grid.dx(),
        });
    }
    let mut slice: Vec<f64> = (0..grid.n_x()).map(|i| d.profile(grid.x(i))).collect();
    let mass: f64 = slice.iter().sum::<f64>() * grid.dx();
    for v in &mut slice {
        *v /= mass;
    }
    Ok(slice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_even_with_unit_mass() {
        let g = SpaceTimeGrid::new(3.0, 401, 4).unwrap();
        let s = dirac_slice(&g, &MollifiedDirac::grid_gaussian(&g, 2.0)).unwrap();
        let mass: f64 = s.iter().sum::<f64>() * g.dx();
        assert!((mass - 1.0).abs() < 1e-12);
        for i in 0..g.n_x() {
            assert_eq!(s[i], s[g.n_x() - 1 - i]);
            assert!(s[i] >= 0.0);
        }
    }

    #[test]
    fn triangle_at_grid_width_is_three_point_hat() {
        let g = SpaceTimeGrid::new(3.0, 21, 4).unwrap();
        let s = dirac_slice(&g, &MollifiedDirac::triangle(g.dx())).unwrap();
        let c = g.center();
        let nonzero: Vec<usize> = (0..g.n_x()).filter(|&i| s[i] > 0.0).collect();
        assert_eq!(nonzero, vec![c - 1, c, c + 1]);
        assert!((s[c] * g.dx() - 0.5).abs() < 1e-14);
        assert!((s[c - 1] * g.dx() - 0.25).abs() < 1e-14);
        let mass: f64 = s.iter().sum::<f64>() * g.dx();
        assert!((mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_narrow_width_is_rejected() {
        let g = SpaceTimeGrid::new(3.0, 401, 4).unwrap();
        let err = dirac_slice(&g, &MollifiedDirac::gaussian(0.1 * g.dx())).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { .. }));
    }
}
