use ndarray::Array2;

use super::ViscousParams;
use crate::numerics::{Quantity, ScalarField, SpaceTimeGrid, Tridiagonal};
use crate::{Error, Result};

/// `w = x^2 / (2 (t + eta)) + eps ln((t + eta) / eta)`, the solution with
/// zero right-hand side. It is a lower bound for `u` whenever `rho >= 0`.
pub fn comparison_function(x: f64, t: f64, p: &ViscousParams) -> f64 {
    x * x / (2.0 * (t + p.eta)) + p.eps * ((t + p.eta) / p.eta).ln()
}

fn check_fits(f: &ScalarField, grid: &SpaceTimeGrid) -> Result<()> {
    if f.fits(grid) {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: (grid.n_t() + 1) * grid.n_x(),
            got: f.values.len(),
        })
    }
}

/// Marches the HJB equation forward from `u(x, 0) = x^2 / (2 eta)`.
///
/// The unknown is `v = u - w`, which starts at zero and solves
/// `v_t - eps v_xx + (x / (t + eta)) v_x + (v_x)^2 / 2 = rho`. Diffusion and
/// the linear drift (upwinded) are implicit; the Hamiltonian `(v_x)^2 / 2` is
/// explicit with Godunov's flux and subject to a CFL restriction. The right
/// hand side is taken at the new time level. At the domain ends `v` is
/// extrapolated linearly.
pub fn hjb_forward(
    rho: &ScalarField,
    p: &ViscousParams,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    check_fits(rho, grid)?;
    let v = march_shifted(rho, p, grid)?;
    let mut u = ScalarField::from_fn(grid, Quantity::ValueFunction, |x, t| {
        comparison_function(x, t, p)
    });
    u.values += &v;
    Ok(u)
}

fn march_shifted(
    rho: &ScalarField,
    p: &ViscousParams,
    grid: &SpaceTimeGrid,
) -> Result<Array2<f64>> {
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    let xs = grid.xs();
    let mut v = Array2::<f64>::zeros((n_t + 1, n_x));
    let diff = p.eps / (dx * dx);
    let mut ghost = vec![0.0; n_x + 2];
    let mut rhs = vec![0.0; n_x];

    for n in 0..n_t {
        let t_new = grid.t(n + 1);
        let old = v.row(n);
        ghost[0] = 2.0 * old[0] - old[1];
        ghost[n_x + 1] = 2.0 * old[n_x - 1] - old[n_x - 2];
        for i in 0..n_x {
            ghost[i + 1] = old[i];
        }
        let mut max_slope = 0.0_f64;
        for i in 0..n_x {
            let back = (ghost[i + 1] - ghost[i]) / dx;
            let fwd = (ghost[i + 2] - ghost[i + 1]) / dx;
            max_slope = max_slope.max(back.abs()).max(fwd.abs());
            let h = 0.5 * back.max(0.0).powi(2).max(fwd.min(0.0).powi(2));
            rhs[i] = old[i] / dt - h + rho.values[[n + 1, i]];
        }
        let cfl = dt * max_slope / dx;
        if cfl > 1.0 {
            return Err(Error::Cfl { cfl, step: n });
        }

        let mut m = Tridiagonal::zeros(n_x);
        for i in 0..n_x {
            let b = xs[i] / (t_new + p.eta);
            m.diag[i] = 1.0 / dt + b.abs() / dx;
            if b > 0.0 {
                m.lower[i] -= b / dx;
            } else {
                m.upper[i] += b / dx;
            }
            if i > 0 && i + 1 < n_x {
                m.diag[i] += 2.0 * diff;
                m.lower[i] -= diff;
                m.upper[i] -= diff;
            }
        }
        let new = m.solve(&rhs)?;
        v.row_mut(n + 1).assign(&ndarray::ArrayView1::from(&new));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_gives_comparison_function() {
        let g = SpaceTimeGrid::new(3.0, 101, 50).unwrap();
        let p = ViscousParams::new(0.05, 0.1).unwrap();
        let rho = ScalarField::zeros(&g, Quantity::Density);
        let u = hjb_forward(&rho, &p, &g).unwrap();
        assert_eq!(u.values[[0, g.center()]], 0.0);
        for n in 0..=g.n_t() {
            for (i, x) in g.xs().into_iter().enumerate() {
                assert!((u.values[[n, i]] - comparison_function(x, g.t(n), &p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_density_is_rejected() {
        let g = SpaceTimeGrid::new(3.0, 11, 10).unwrap();
        let other = SpaceTimeGrid::new(3.0, 13, 10).unwrap();
        let rho = ScalarField::zeros(&other, Quantity::Density);
        assert!(hjb_forward(&rho, &ViscousParams::new(0.1, 0.1).unwrap(), &g).is_err());
    }
}
