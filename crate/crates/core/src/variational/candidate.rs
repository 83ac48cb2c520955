use serde::{Deserialize, Serialize};

use super::functional::{AdmissiblePair, Constraint, Weights};
use crate::numerics::{
    gauss_legendre, FluxField, MollifiedDirac, MollifierKind, Quantity, ScalarField, SpaceTimeGrid,
};
use crate::viscous::ViscousParams;
use crate::{Error, Result};

/// Time profile of the heat-kernel candidate: `rho(., t)` is the heat kernel
/// `exp(-x^2 / (4 s)) / sqrt(4 pi s)` at `s = clock(t)`, where
///
/// ```text
/// clock(t) = eta + c0 t^theta                          on [0, 1/2]
/// clock(t) = s0 + eps (1 - t) + (1 - t)^theta          on [1/2, 1]
/// ```
///
/// `s0 = sigma^2 / 2` makes the terminal slice the gaussian mollifier of
/// width `sigma`, and `c0` makes the clock continuous at `t = 1/2`. Since
/// `rho_t = clock' rho_xx`, the flux `beta = rho a` with
/// `a = (clock' + eps) x / (2 clock)` satisfies the viscous continuity
/// equation exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateProfile {
    pub eps: f64,
    pub eta: f64,
    pub theta: f64,
    pub s0: f64,
    pub c0: f64,
}

impl CandidateProfile {
    pub fn new(p: &ViscousParams, theta: f64, terminal: &MollifiedDirac) -> Result<Self> {
        if !(theta > 1.0 && theta < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "θ must lie in (1, 2), got {theta}"
            )));
        }
        if terminal.kind != MollifierKind::Gaussian {
            return Err(Error::InvalidParameter(
                "the candidate needs a gaussian terminal mollifier".into(),
            ));
        }
        let s0 = 0.5 * terminal.width * terminal.width;
        let half = 0.5_f64.powf(theta);
        let c0 = (s0 + 0.5 * p.eps + half - p.eta) / half;
        if c0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "η = {} too large for a continuous candidate clock (c0 = {c0})",
                p.eta
            )));
        }
        Ok(Self {
            eps: p.eps,
            eta: p.eta,
            theta,
            s0,
            c0,
        })
    }

    /// The `eps = eta = 0` member of the family, which starts from a Dirac
    /// mass at `t = 0`; here `c0 = 1 + s0 2^theta`.
    pub fn limit(theta: f64, terminal: &MollifiedDirac) -> Result<Self> {
        let p = ViscousParams::new(f64::MIN_POSITIVE, f64::MIN_POSITIVE)?;
        let c = Self::new(&p, theta, terminal)?;
        let half = 0.5_f64.powf(theta);
        Ok(Self {
            eps: 0.0,
            eta: 0.0,
            c0: (c.s0 + half) / half,
            ..c
        })
    }

    /// Value of the functional on the whole line, with the slice integrals
    /// in closed form: `int rho^2 = 1 / sqrt(8 pi s)` and
    /// `int beta^2 / rho = (clock' + eps)^2 / (2 s)` at `s = clock(t)`. The
    /// penalization `int rho(x, 0) x^2 / (2 eta)` equals 1 for every
    /// `eta > 0` and is kept at that value in the limit.
    pub fn continuum_total(&self, weights: Weights) -> f64 {
        let f = |t: f64| {
            let s = self.clock(t);
            let rate = self.clock_rate(t) + self.eps;
            weights.congestion / (8.0 * std::f64::consts::PI * s).sqrt()
                + weights.kinetic * rate * rate / (2.0 * s)
        };
        // Uniform panels on [1/4, 3/4], geometric ones towards both ends.
        let levels = 60;
        let mut total = 0.0;
        for k in 0..16 {
            let lo = 0.25 + k as f64 / 32.0;
            total += gauss_legendre(lo, lo + 1.0 / 32.0, f);
        }
        for k in 0..levels {
            let (lo, hi) = (0.5_f64.powi(k + 3), 0.5_f64.powi(k + 2));
            total += gauss_legendre(lo, hi, f);
            total += gauss_legendre(1.0 - hi, 1.0 - lo, f);
        }
        let tau = 0.5_f64.powi(levels + 2);
        total += if self.eta == 0.0 && self.eps == 0.0 {
            // clock = c0 t^theta near 0, integrated exactly.
            let th = self.theta;
            weights.congestion * tau.powf(1.0 - 0.5 * th)
                / ((1.0 - 0.5 * th) * (8.0 * std::f64::consts::PI * self.c0).sqrt())
                + weights.kinetic * self.c0 * th * th * tau.powf(th - 1.0) / (2.0 * (th - 1.0))
        } else {
            tau * f(0.5 * tau)
        };
        1.0 + total
    }

    pub fn clock(&self, t: f64) -> f64 {
        if t <= 0.5 {
            self.eta + self.c0 * t.powf(self.theta)
        } else {
            let r = 1.0 - t;
            self.s0 + self.eps * r + r.powf(self.theta)
        }
    }

    pub fn clock_rate(&self, t: f64) -> f64 {
        if t <= 0.5 {
            self.c0 * self.theta * t.powf(self.theta - 1.0)
        } else {
            -self.eps - self.theta * (1.0 - t).powf(self.theta - 1.0)
        }
    }

    pub fn rho(&self, x: f64, t: f64) -> f64 {
        let s = self.clock(t);
        (-x * x / (4.0 * s)).exp() / (4.0 * std::f64::consts::PI * s).sqrt()
    }

    pub fn drift(&self, x: f64, t: f64) -> f64 {
        (self.clock_rate(t) + self.eps) * x / (2.0 * self.clock(t))
    }
}

/// Heat-kernel admissible pair for the viscous problem with penalty `eta`.
///
/// Each density slice is renormalized to unit mass on the grid; the flux is
/// sampled at faces and half steps.
pub fn prop32_candidate(
    p: &ViscousParams,
    theta: f64,
    grid: &SpaceTimeGrid,
    terminal: &MollifiedDirac,
) -> Result<AdmissiblePair> {
    let c = CandidateProfile::new(p, theta, terminal)?;
    let mut rho = ScalarField::from_fn(grid, Quantity::Density, |x, t| c.rho(x, t));
    let dx = grid.dx();
    for n in 0..=grid.n_t() {
        let mut row = rho.slice_mut(n);
        let mass = row.sum() * dx;
        row.mapv_inplace(|v| v / mass);
    }
    let dt = grid.dt();
    let mut beta = FluxField::zeros(grid);
    for n in 0..grid.n_t() {
        let t = (n as f64 + 0.5) * dt;
        for (f, x) in grid.face_xs().into_iter().enumerate() {
            beta.values[[n, f]] = c.rho(x, t) * c.drift(x, t);
        }
    }
    Ok(AdmissiblePair {
        rho,
        beta,
        constraint: Constraint::Viscous { eps: p.eps },
        eta: Some(p.eta),
    })
}

/// First-order counterpart of [`prop32_candidate`]: no diffusion and the
/// initial clock equal to the terminal one, so both end slices are the same
/// gaussian mollifier.
pub fn first_order_candidate(
    theta: f64,
    grid: &SpaceTimeGrid,
    endpoint: &MollifiedDirac,
) -> Result<AdmissiblePair> {
    if endpoint.width <= 0.0 {
        return Err(Error::InvalidParameter(
            "the candidate needs a positive mollifier width".into(),
        ));
    }
    let s0 = 0.5 * endpoint.width * endpoint.width;
    let p = ViscousParams::new(f64::MIN_POSITIVE, s0)?;
    let mut pair = prop32_candidate(&p, theta, grid, endpoint)?;
    pair.constraint = Constraint::FirstOrder;
    pair.eta = None;
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_is_continuous_at_half() {
        let p = ViscousParams::new(0.05, 0.1).unwrap();
        let c = CandidateProfile::new(&p, 1.5, &MollifiedDirac::gaussian(0.03)).unwrap();
        assert!((c.clock(0.5) - c.clock(0.5 + 1e-15)).abs() < 1e-12);
        assert!((c.clock(0.0) - 0.1).abs() < 1e-15);
        assert!((c.clock(1.0) - 0.00045).abs() < 1e-15);
    }

    #[test]
    fn c0_tends_to_one() {
        let p = ViscousParams::new(1e-12, 1e-12).unwrap();
        let c = CandidateProfile::new(&p, 1.5, &MollifiedDirac::gaussian(1e-6)).unwrap();
        assert!((c.c0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn heat_kernel_solves_continuity() {
        // rho_t + eps rho_xx + (rho a)_x = 0 checked by finite differences.
        let p = ViscousParams::new(0.05, 0.1).unwrap();
        let c = CandidateProfile::new(&p, 1.5, &MollifiedDirac::gaussian(0.03)).unwrap();
        let h = 1e-4;
        for &(x, t) in &[(0.2, 0.3), (-0.5, 0.8), (0.05, 0.95)] {
            let rho_t = (c.rho(x, t + h) - c.rho(x, t - h)) / (2.0 * h);
            let rho_xx = (c.rho(x + h, t) - 2.0 * c.rho(x, t) + c.rho(x - h, t)) / (h * h);
            let flux = |x: f64| c.rho(x, t) * c.drift(x, t);
            let div = (flux(x + h) - flux(x - h)) / (2.0 * h);
            let scale = rho_t.abs() + div.abs();
            assert!(
                (rho_t + p.eps * rho_xx + div).abs() < 1e-5 * scale,
                "({x}, {t})"
            );
        }
    }

    #[test]
    fn limit_clock_starts_at_zero() {
        let c = CandidateProfile::limit(1.5, &MollifiedDirac::gaussian(0.03)).unwrap();
        assert_eq!(c.clock(0.0), 0.0);
        assert!((c.clock(0.5) - c.clock(0.5 + 1e-15)).abs() < 1e-12);
    }

    #[test]
    fn continuum_total_matches_brute_force() {
        let p = ViscousParams::new(0.05, 0.1).unwrap();
        let c = CandidateProfile::new(&p, 1.5, &MollifiedDirac::gaussian(0.1)).unwrap();
        // Midpoint rule in t with fine trapezoid slices in x.
        let (nt, nx, xm) = (4000, 4001, 3.0);
        let h = 2.0 * xm / (nx - 1) as f64;
        let mut total = 0.0;
        for n in 0..nt {
            let t = (n as f64 + 0.5) / nt as f64;
            let slice: f64 = (0..nx)
                .map(|i| {
                    let x = -xm + i as f64 * h;
                    let rho = c.rho(x, t);
                    0.5 * (rho * rho + rho * c.drift(x, t).powi(2))
                })
                .sum();
            total += slice * h / nt as f64;
        }
        let expected = c.continuum_total(Weights::HALF) - 1.0;
        assert!(
            (total / expected - 1.0).abs() < 1e-3,
            "{total} vs {expected}"
        );
    }

    #[test]
    fn theta_out_of_range() {
        let p = ViscousParams::new(0.05, 0.1).unwrap();
        assert!(CandidateProfile::new(&p, 2.0, &MollifiedDirac::gaussian(0.03)).is_err());
        assert!(CandidateProfile::new(&p, 1.0, &MollifiedDirac::gaussian(0.03)).is_err());
    }
}
