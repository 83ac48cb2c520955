use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ode::{integrate, Phase, ProfileOde, StepControl, Stop};
use super::singular_tail_mass;
use crate::{Error, Result};

/// Default distance from the singular endpoints at which integration stops.
pub const DEFAULT_T_FLOOR: f64 = 1e-6;

/// `r l` for a unit-mass parabolic profile.
pub const HALF_MASS_PRODUCT: f64 = 0.75;

const BLOW_UP_R: f64 = 1e10;
const NO_BLOW_UP_HORIZON: f64 = 4.0;

/// Turning value `r_min` of the symmetric limit profile, attained at `t = 1/2`.
///
/// The focusing half from `r_min` to blow-up takes `3 pi / (16 r_min^(3/2))`,
/// and setting this to `1/2` gives `(3 pi / 8)^(2/3)`.
pub fn limit_turning_density() -> f64 {
    (3.0 * std::f64::consts::PI / 8.0).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ProfileKind {
    Limit,
    Eta { eta: f64 },
}

/// Turning point of the profile and, for the penalized kind, the initial peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingData {
    pub t_turn: f64,
    pub r_turn: f64,
    pub r_start: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub k: f64,
    pub r: f64,
    pub l: f64,
    pub a: f64,
}

impl ProfileSample {
    fn from_state(s: &ProfileOde) -> Self {
        Self {
            t: s.t,
            k: s.k,
            r: s.r,
            l: s.half_width(),
            a: s.a,
        }
    }

    pub fn phase(&self) -> Phase {
        ProfileOde::new(self.t, self.k, self.r, self.a).phase()
    }

    /// Density at `x` for this time slice.
    pub fn rho(&self, x: f64) -> f64 {
        let y = x / self.l;
        self.r * (1.0 - y * y).max(0.0)
    }
}

/// Sampled solution of the profile equations on `[t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub samples: Vec<ProfileSample>,
    pub kind: ProfileKind,
    pub matching: MatchingData,
    pub t_floor: f64,
    /// `k(1)`, including the analytic contribution of `(1 - t_floor, 1)`.
    pub k_terminal: f64,
}

impl ProfileSolution {
    pub fn t_lo(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_hi(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn eta(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Limit => None,
            ProfileKind::Eta { eta } => Some(eta),
        }
    }

    /// Profile coefficients at `t`, linear in `t` between samples. `l` is
    /// recomputed from the interpolated `r` so that unit mass holds exactly.
    pub fn at(&self, t: f64) -> Result<ProfileSample> {
        let (lo, hi) = (self.t_lo(), self.t_hi());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let j = self.samples.partition_point(|s| s.t <= t);
        if j == self.samples.len() {
            return Ok(self.samples[j - 1]);
        }
        let (s0, s1) = (&self.samples[j - 1], &self.samples[j]);
        let w = (t - s0.t) / (s1.t - s0.t);
        let lerp = |p: f64, q: f64| p + w * (q - p);
        let r = lerp(s0.r, s1.r);
        Ok(ProfileSample {
            t,
            k: lerp(s0.k, s1.k),
            r,
            l: HALF_MASS_PRODUCT / r,
            a: lerp(s0.a, s1.a),
        })
    }

    pub fn rho(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.at(t)?.rho(x))
    }

    /// Number of sign changes of `a` along the samples.
    pub fn phase_changes(&self) -> usize {
        self.samples
            .windows(2)
            .filter(|w| w[0].phase() != w[1].phase())
            .count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        crate::output::write_csv(
            w,
            &["t", "k", "r", "l", "a"],
            self.samples.iter().map(|s| [s.t, s.k, s.r, s.l, s.a]),
        )
    }
}

pub fn eval_rho_bar(p: &ProfileSolution, x: f64, t: f64) -> Result<f64> {
    p.rho(x, t)
}

fn check_resolution(n_steps: usize, t_floor: f64) -> Result<()> {
    if n_steps < 100 {
        return Err(Error::InvalidParameter(format!(
            "n_steps must be at least 100, got {n_steps}"
        )));
    }
    if !(t_floor > 0.0 && t_floor <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "t_floor must lie in (0, 1e-3], got {t_floor}"
        )));
    }
    Ok(())
}

fn run(start: ProfileOde, t_end: f64, ctrl: &StepControl) -> Result<Vec<ProfileOde>> {
    let (states, stop) = integrate(start, t_end, ctrl, f64::INFINITY);
    match stop {
        Stop::Reached => Ok(states),
        _ => {
            let last = states[states.len() - 1];
            Err(Error::OdeFailure {
                t: last.t,
                reason: format!(
                    "step size underflow before reaching t = {t_end} (r = {:e})",
                    last.r
                ),
            })
        }
    }
}

/// Symmetric profile joining the initial and terminal Dirac masses,
/// integrated outward from its turning point at `t = 1/2`.
pub fn integrate_limit_profile(n_steps: usize, t_floor: f64) -> Result<ProfileSolution> {
    check_resolution(n_steps, t_floor)?;
    let ctrl = StepControl::new(n_steps);
    let r_turn = limit_turning_density();
    let anchor = ProfileOde::new(0.5, 0.0, r_turn, 0.0);
    let left = run(anchor, t_floor, &ctrl)?;
    let right = run(anchor, 1.0 - t_floor, &ctrl)?;

    let shift = singular_tail_mass(t_floor) - left[left.len() - 1].k;
    let samples: Vec<ProfileSample> = left
        .iter()
        .rev()
        .chain(right.iter().skip(1))
        .map(|s| {
            let mut p = ProfileSample::from_state(s);
            p.k += shift;
            p
        })
        .collect();
    let k_terminal = samples[samples.len() - 1].k + singular_tail_mass(t_floor);
    Ok(ProfileSolution {
        samples,
        kind: ProfileKind::Limit,
        matching: MatchingData {
            t_turn: 0.5,
            r_turn,
            r_start: None,
        },
        t_floor,
        k_terminal,
    })
}

pub fn integrate_eta_profile(eta: f64, n_steps: usize) -> Result<ProfileSolution> {
    integrate_eta_profile_with(eta, n_steps, DEFAULT_T_FLOOR)
}

/// Blow-up time of the trajectory started from `(0, 0, r0, 1/eta)`, or
/// infinity if `r` has not blown up by the horizon.
fn blow_up_time(r0: f64, eta: f64, ctrl: &StepControl) -> f64 {
    let start = ProfileOde::new(0.0, 0.0, r0, 1.0 / eta);
    let (states, stop) = integrate(start, NO_BLOW_UP_HORIZON, ctrl, BLOW_UP_R);
    let last = states[states.len() - 1];
    match stop {
        Stop::Reached => f64::INFINITY,
        // Near blow-up r ~ (4 (T - t))^(-2/3).
        Stop::BlowUp | Stop::Underflow => last.t + last.r.powf(-1.5) / 4.0,
    }
}

/// Penalized profile started at `t = 0` with `a = 1/eta`; the initial peak is
/// found by bisection so that the density blows up exactly at `t = 1`.
pub fn integrate_eta_profile_with(
    eta: f64,
    n_steps: usize,
    t_floor: f64,
) -> Result<ProfileSolution> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "η out of range (0, 0.5]: {eta}"
        )));
    }
    check_resolution(n_steps, t_floor)?;
    let ctrl = StepControl::new(n_steps);

    let mut lo = limit_turning_density();
    let mut hi = 10.0 / eta.powf(2.0 / 3.0);
    let (t_lo, t_hi) = (blow_up_time(lo, eta, &ctrl), blow_up_time(hi, eta, &ctrl));
    if !(t_lo > 1.0 && t_hi < 1.0) {
        return Err(Error::Shooting(format!(
            "no sign change on bracket r0 in [{lo}, {hi}]: blow-up times {t_lo} and {t_hi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if blow_up_time(mid, eta, &ctrl) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_start = 0.5 * (lo + hi);

    let states = run(
        ProfileOde::new(0.0, 0.0, r_start, 1.0 / eta),
        1.0 - t_floor,
        &ctrl,
    )?;
    let end = states[states.len() - 1];
    let rate = end.r * (4.0 * t_floor).powf(2.0 / 3.0);
    if (rate - 1.0).abs() > 0.01 {
        return Err(Error::Shooting(format!(
            "terminal blow-up rate off by {:.3e} (r0 = {r_start}, bracket [{lo}, {hi}])",
            rate - 1.0
        )));
    }

    let samples: Vec<ProfileSample> = states.iter().map(ProfileSample::from_state).collect();
    let t_turn = samples
        .windows(2)
        .find(|w| w[0].a > 0.0 && w[1].a <= 0.0)
        .map(|w| w[0].t + (w[1].t - w[0].t) * w[0].a / (w[0].a - w[1].a))
        .unwrap_or(0.0);
    let k_terminal = end.k + singular_tail_mass(t_floor);
    Ok(ProfileSolution {
        samples,
        kind: ProfileKind::Eta { eta },
        matching: MatchingData {
            t_turn,
            r_turn: states[0].turning_density(),
            r_start: Some(r_start),
        },
        t_floor,
        k_terminal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_profile_turns_once_at_half() {
        let p = integrate_limit_profile(1000, 1e-6).unwrap();
        assert_eq!(p.phase_changes(), 1);
        let mid = p.at(0.5).unwrap();
        assert!((mid.r - limit_turning_density()).abs() < 1e-12);
        assert!(mid.a.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(integrate_limit_profile(50, 1e-6).is_err());
        assert!(integrate_limit_profile(1000, 1e-2).is_err());
        assert!(integrate_limit_profile(1000, 0.0).is_err());
    }

    #[test]
    fn out_of_range_time_is_an_error() {
        let p = integrate_limit_profile(200, 1e-4).unwrap();
        assert!(matches!(p.rho(0.0, 1e-5), Err(Error::OutOfRange { .. })));
        assert!(p.rho(0.0, 0.99999).is_err());
    }

    #[test]
    fn eta_out_of_range() {
        let err = integrate_eta_profile(0.6, 1000).unwrap_err();
        assert!(err.to_string().contains("η out of range"), "{err}");
        assert!(integrate_eta_profile(0.0, 1000).is_err());
    }

    #[test]
    fn csv_has_five_columns() {
        let p = integrate_limit_profile(100, 1e-3).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,k,r,l,a"));
        assert_eq!(lines.count(), p.samples.len());
    }
}
