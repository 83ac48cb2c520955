use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::explicit::{eval_u_bar, CharacteristicFan, ProfileKind, ProfileSolution};
use crate::numerics::{MollifiedDirac, SpaceTimeGrid};
use crate::variational::sample_profile_pair;
use crate::viscous::ViscousSolution;
use crate::{Error, Result};

/// Earliest time a value-function window may reach: the limit value is
/// singular at `t = 0`.
const MIN_WINDOW_T: f64 = 0.1;

/// Rectangle `[x_lo, x_hi] x [t_lo, t_hi]` of grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UWindow {
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Default for UWindow {
    fn default() -> Self {
        Self {
            x_lo: -1.0,
            x_hi: 1.0,
            t_lo: 0.25,
            t_hi: 1.0,
        }
    }
}

impl UWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_lo >= MIN_WINDOW_T) {
            return Err(Error::InvalidParameter(format!(
                "window must exclude t < {MIN_WINDOW_T}, got t_lo = {}",
                self.t_lo
            )));
        }
        if !(self.x_lo <= self.x_hi && self.t_lo <= self.t_hi && self.t_hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "empty or inverted window {self:?}"
            )));
        }
        Ok(())
    }

    fn contains(&self, x: f64, t: f64) -> bool {
        let tol = 1e-12;
        x >= self.x_lo - tol && x <= self.x_hi + tol && t >= self.t_lo - tol && t <= self.t_hi + tol
    }
}

/// Nodal value function and density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningState {
    pub u: Array2<f64>,
    pub rho: Array2<f64>,
}

impl PlanningState {
    pub fn from_solution(sol: &ViscousSolution) -> Self {
        Self {
            u: sol.u.values.clone(),
            rho: sol.rho.values.clone(),
        }
    }

    /// Penalized explicit profile sampled on the grid. The terminal Dirac
    /// mass is replaced by the mollifier `d`, as in the viscous solve. The
    /// limit profile has no finite initial value and is rejected.
    pub fn from_profile(
        p: &ProfileSolution,
        grid: &SpaceTimeGrid,
        d: &MollifiedDirac,
    ) -> Result<Self> {
        if p.kind == ProfileKind::Limit {
            return Err(Error::InvalidParameter(
                "the limit profile has no finite initial value function".into(),
            ));
        }
        let fan = CharacteristicFan::new(p);
        let rho = sample_profile_pair(p, grid, d)?.rho.values;
        let xs = grid.xs();
        let mut u = Array2::zeros((grid.n_t() + 1, grid.n_x()));
        for n in 0..=grid.n_t() {
            let t = grid.t(n);
            for (i, &x) in xs.iter().enumerate() {
                u[[n, i]] = eval_u_bar(p, &fan, x, t)?;
            }
        }
        Ok(Self { u, rho })
    }

    fn fits(&self, grid: &SpaceTimeGrid) -> Result<()> {
        let shape = (grid.n_t() + 1, grid.n_x());
        if self.u.dim() != shape || self.rho.dim() != shape {
            return Err(Error::LengthMismatch {
                expected: shape.0 * shape.1,
                got: self.u.len().min(self.rho.len()),
            });
        }
        Ok(())
    }
}

/// Largest `|u - u_bar|` over the grid nodes of the window.
pub fn local_uniform_u_error(
    sol: &ViscousSolution,
    grid: &SpaceTimeGrid,
    profile: &ProfileSolution,
    fan: &CharacteristicFan,
    window: &UWindow,
) -> Result<f64> {
    window.validate()?;
    let xs = grid.xs();
    let mut worst: Option<f64> = None;
    for n in 0..=grid.n_t() {
        let t = grid.t(n);
        for (i, &x) in xs.iter().enumerate() {
            if window.contains(x, t) {
                let err = (sol.u.values[[n, i]] - eval_u_bar(profile, fan, x, t)?).abs();
                worst = Some(worst.map_or(err, |w| w.max(err)));
            }
        }
    }
    worst.ok_or_else(|| Error::InvalidParameter(format!("window {window:?} contains no grid node")))
}

/// The two viscous terms of the comparison identity between a viscous
/// solution and a reference state `(u_ref, rho_ref)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTerms {
    /// `eps int int rho (u_ref)_xx`.
    pub rho_uxx_ref: f64,
    /// `eps int int u_xx rho_ref`.
    pub uxx_rho_ref: f64,
}

impl CrossTerms {
    /// `eps int int (rho (u_ref)_xx - u_xx rho_ref)`.
    pub fn difference(&self) -> f64 {
        self.rho_uxx_ref - self.uxx_rho_ref
    }
}

/// `-int f_x g_x dx` with face differences, i.e. `int f g_xx` after a
/// discrete integration by parts (the densities vanish at the walls).
fn by_parts(f: ArrayView1<'_, f64>, g: ArrayView1<'_, f64>, dx: f64) -> f64 {
    -(0..f.len() - 1)
        .map(|i| (f[i + 1] - f[i]) * (g[i + 1] - g[i]))
        .sum::<f64>()
        / dx
}

/// Trapezoid weights in time.
fn time_weight(n: usize, grid: &SpaceTimeGrid) -> f64 {
    if n == 0 || n == grid.n_t() {
        0.5 * grid.dt()
    } else {
        grid.dt()
    }
}

pub fn cross_terms(
    sol: &ViscousSolution,
    reference: &PlanningState,
    grid: &SpaceTimeGrid,
) -> Result<CrossTerms> {
    reference.fits(grid)?;
    let (eps, dx) = (sol.params.eps, grid.dx());
    let mut out = CrossTerms {
        rho_uxx_ref: 0.0,
        uxx_rho_ref: 0.0,
    };
    for n in 0..=grid.n_t() {
        let w = eps * time_weight(n, grid);
        out.rho_uxx_ref += w * by_parts(sol.rho.values.row(n), reference.u.row(n), dx);
        out.uxx_rho_ref += w * by_parts(reference.rho.row(n), sol.u.values.row(n), dx);
    }
    Ok(out)
}

/// `int_theta^(1-theta) int [(rho_a - rho_b)^2 + (rho_a + rho_b) (u_a,x - u_b,x)^2 / 2]`,
/// a sum of squares measuring the distance between two states.
pub fn uniqueness_identity_check(
    a: &PlanningState,
    b: &PlanningState,
    grid: &SpaceTimeGrid,
    theta: f64,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 0.4) {
        return Err(Error::InvalidParameter(format!(
            "margin θ must lie in (0, 0.4), got {theta}"
        )));
    }
    a.fits(grid)?;
    b.fits(grid)?;
    let dx = grid.dx();
    let slices: Vec<usize> = (0..=grid.n_t())
        .filter(|&n| grid.t(n) >= theta - 1e-12 && grid.t(n) <= 1.0 - theta + 1e-12)
        .collect();
    let mut total = 0.0;
    for (k, &n) in slices.iter().enumerate() {
        let (ra, rb, ua, ub) = (a.rho.row(n), b.rho.row(n), a.u.row(n), b.u.row(n));
        let mut slice = 0.0;
        for i in 0..grid.n_x() {
            slice += (ra[i] - rb[i]).powi(2);
        }
        for f in 0..grid.n_x() - 1 {
            let mass = 0.25 * (ra[f] + ra[f + 1] + rb[f] + rb[f + 1]);
            let slope = (ua[f + 1] - ua[f] - ub[f + 1] + ub[f]) / dx;
            slice += mass * slope * slope;
        }
        let w = if k == 0 || k == slices.len() - 1 {
            0.5
        } else {
            1.0
        };
        total += w * grid.dt() * slice * dx;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rejects_early_times() {
        let w = UWindow {
            t_lo: 0.05,
            ..UWindow::default()
        };
        assert!(w.validate().is_err());
        assert!(UWindow::default().validate().is_ok());
    }

    #[test]
    fn identical_states_have_zero_form() {
        let g = SpaceTimeGrid::new(1.0, 21, 10).unwrap();
        let s = PlanningState {
            u: Array2::from_shape_fn((11, 21), |(n, i)| (n * i) as f64 * 0.01),
            rho: Array2::from_shape_fn((11, 21), |(n, i)| ((n + i) % 3) as f64),
        };
        assert_eq!(uniqueness_identity_check(&s, &s, &g, 0.1).unwrap(), 0.0);
        assert!(uniqueness_identity_check(&s, &s, &g, 0.45).is_err());
    }

    #[test]
    fn by_parts_matches_second_derivative() {
        // f = 1 - x^2 on [-1, 1], g = x^2: int f g_xx = 2 int (1 - x^2) = 8/3.
        let n = 2001;
        let dx = 2.0 / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * dx).collect();
        let f: Vec<f64> = xs.iter().map(|x| 1.0 - x * x).collect();
        let g: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let v = by_parts(ArrayView1::from(&f), ArrayView1::from(&g), dx);
        assert!((v - 8.0 / 3.0).abs() < 1e-5, "{v}");
    }
}
