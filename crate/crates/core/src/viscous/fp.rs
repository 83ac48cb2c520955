use super::ViscousParams;
use crate::numerics::{Quantity, ScalarField, SpaceTimeGrid, Tridiagonal};
use crate::{Error, Result};

const MASS_TOL: f64 = 1e-10;

/// Marches the Fokker-Planck equation backward from `rho(., 1) = terminal`.
///
/// In reversed time `s = 1 - t` this is `rho_s - eps rho_xx - (u_x rho)_x = 0`.
/// Each step is fully implicit finite volume: upwind transport with face
/// velocity `-u_x` taken from the slice being computed, centred diffusion,
/// zero flux through the domain ends. The matrix is an M-matrix whose columns
/// sum to one, so positivity and mass are preserved up to rounding; small
/// negative round-off is clamped.
pub fn fp_backward(
    u: &ScalarField,
    p: &ViscousParams,
    grid: &SpaceTimeGrid,
    terminal: &[f64],
) -> Result<ScalarField> {
    fp_backward_tracked(u, p, grid, terminal).map(|(rho, _)| rho)
}

/// As [`fp_backward`], also returning the smallest value seen before clamping.
pub(crate) fn fp_backward_tracked(
    u: &ScalarField,
    p: &ViscousParams,
    grid: &SpaceTimeGrid,
    terminal: &[f64],
) -> Result<(ScalarField, f64)> {
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    if !u.fits(grid) {
        return Err(Error::LengthMismatch {
            expected: (n_t + 1) * n_x,
            got: u.values.len(),
        });
    }
    if terminal.len() != n_x {
        return Err(Error::LengthMismatch {
            expected: n_x,
            got: terminal.len(),
        });
    }
    let mass: f64 = terminal.iter().sum::<f64>() * dx;
    if terminal.iter().any(|&v| v < 0.0) || (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidParameter(format!(
            "terminal density must be nonnegative with unit mass (mass {mass})"
        )));
    }

    let mut rho = ScalarField::zeros(grid, Quantity::Density);
    rho.slice_mut(n_t)
        .assign(&ndarray::ArrayView1::from(terminal));
    let k = dt / dx;
    let diff = p.eps / dx;
    let mut min_seen = f64::INFINITY;

    for n in (0..n_t).rev() {
        let row = u.slice(n);
        let mut m = Tridiagonal::zeros(n_x);
        m.diag.fill(1.0);
        for f in 0..n_x - 1 {
            let c = -(row[f + 1] - row[f]) / dx;
            let (cp, cm) = (c.max(0.0), c.min(0.0));
            // Flux through face f: cp rho_f + cm rho_{f+1} - eps (rho_{f+1} - rho_f) / dx.
            m.diag[f] += k * (cp + diff);
            m.upper[f] += k * (cm - diff);
            m.lower[f + 1] -= k * (cp + diff);
            m.diag[f + 1] -= k * (cm - diff);
        }
        let prev: Vec<f64> = rho.slice(n + 1).to_vec();
        let mut next = m.solve(&prev)?;
        let before: f64 = next.iter().sum::<f64>() * dx;
        for v in next.iter_mut() {
            min_seen = min_seen.min(*v);
            *v = v.max(0.0);
        }
        let after: f64 = next.iter().sum::<f64>() * dx;
        if (after - before).abs() > MASS_TOL {
            let scale = before / after;
            next.iter_mut().for_each(|v| *v *= scale);
        }
        let drift = next.iter().sum::<f64>() * dx - mass;
        if drift.abs() > MASS_TOL {
            return Err(Error::MassDrift { drift, slice: n });
        }
        rho.slice_mut(n).assign(&ndarray::ArrayView1::from(&next));
    }
    Ok((rho, min_seen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dirac_slice, MollifiedDirac};

    #[test]
    fn mass_is_conserved_under_transport() {
        let g = SpaceTimeGrid::new(3.0, 121, 60).unwrap();
        let p = ViscousParams::new(0.02, 0.1).unwrap();
        let u = ScalarField::from_fn(&g, Quantity::ValueFunction, |x, t| {
            (x - 0.3).powi(2) * (1.0 + t)
        });
        let d = dirac_slice(&g, &MollifiedDirac::grid_gaussian(&g, 2.0)).unwrap();
        let rho = fp_backward(&u, &p, &g, &d).unwrap();
        for n in 0..=g.n_t() {
            let m = rho.slice(n).sum() * g.dx();
            assert!((m - 1.0).abs() < 1e-10, "slice {n}: {m}");
        }
        assert!(rho.min() >= 0.0);
    }

    #[test]
    fn rejects_unnormalized_terminal() {
        let g = SpaceTimeGrid::new(3.0, 21, 10).unwrap();
        let u = ScalarField::zeros(&g, Quantity::ValueFunction);
        let p = ViscousParams::new(0.1, 0.1).unwrap();
        assert!(fp_backward(&u, &p, &g, &vec![1.0; 21]).is_err());
    }
}
