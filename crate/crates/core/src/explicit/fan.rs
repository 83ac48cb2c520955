use super::profile::{ProfileKind, ProfileSample, ProfileSolution, HALF_MASS_PRODUCT};
use super::singular_tail_mass;
use crate::{Error, Result};

const BISECTION_STEPS: usize = 200;

/// Free-boundary data `(t0, l(t0), l'(t0))` and the boundary value of `u`.
///
/// Outside the support the value function is carried by straight
/// characteristics leaving the free boundary tangentially. Since `l` is
/// concave (`l'' = -(32/9) r^3 l`), the foot `t0` of the tangent through a
/// given exterior point is unique and the residual
/// `l(t0) + (t - t0) l'(t0) - x` is decreasing in `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFan {
    pub t0: Vec<f64>,
    pub l: Vec<f64>,
    pub l_dot: Vec<f64>,
    pub u_boundary: Vec<f64>,
    kind: ProfileKind,
}

/// `l' = a l`, which follows from `r l = 3/4` and `r' = -a r`.
fn boundary(s: &ProfileSample) -> (f64, f64, f64) {
    (s.l, s.a * s.l, s.k + 0.5 * s.a * s.l * s.l)
}

impl CharacteristicFan {
    pub fn new(p: &ProfileSolution) -> Self {
        let n = p.samples.len();
        let mut fan = Self {
            t0: Vec::with_capacity(n),
            l: Vec::with_capacity(n),
            l_dot: Vec::with_capacity(n),
            u_boundary: Vec::with_capacity(n),
            kind: p.kind,
        };
        for s in &p.samples {
            let (l, l_dot, u) = boundary(s);
            fan.t0.push(s.t);
            fan.l.push(l);
            fan.l_dot.push(l_dot);
            fan.u_boundary.push(u);
        }
        fan
    }

    pub fn len(&self) -> usize {
        self.t0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t0.is_empty()
    }

    fn residual(&self, j: usize, x: f64, t: f64) -> f64 {
        self.l[j] + (t - self.t0[j]) * self.l_dot[j] - x
    }
}

/// Coefficients at `t`, continued past the last sample by the blow-up
/// asymptotics `r ~ (4 (1 - t))^(-2/3)`, `a ~ -2 / (3 (1 - t))`.
fn state_at(p: &ProfileSolution, t: f64) -> Result<ProfileSample> {
    if t > p.t_hi() && t <= 1.0 {
        let tau = 1.0 - t;
        let r = if tau > 0.0 {
            (4.0 * tau).powf(-2.0 / 3.0)
        } else {
            f64::INFINITY
        };
        return Ok(ProfileSample {
            t,
            k: p.k_terminal - singular_tail_mass(tau),
            r,
            l: HALF_MASS_PRODUCT / r,
            a: if tau > 0.0 {
                -2.0 / (3.0 * tau)
            } else {
                f64::NEG_INFINITY
            },
        });
    }
    p.at(t)
}

/// Exterior value via the initial-blow-up asymptotics of the limit profile,
/// for points whose tangent foot lies below the first sample.
fn initial_asymptote(x: f64, t: f64, s_max: f64) -> f64 {
    let c = HALF_MASS_PRODUCT * 4.0_f64.powf(2.0 / 3.0);
    let g = |s: f64| c * s.powf(-1.0 / 3.0) * (s / 3.0 + 2.0 * t / 3.0) - x;
    let (mut lo, mut hi) = (f64::MIN_POSITIVE.ln(), s_max.ln());
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if g(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = (0.5 * (lo + hi)).exp();
    let l = c * s.powf(2.0 / 3.0);
    let u = singular_tail_mass(s) + l * l / (3.0 * s);
    u + (x - l).powi(2) / (2.0 * (t - s))
}

/// Value function at `(x, t)`: the quadratic `k + a x^2 / 2` on the support,
/// the tangent-characteristic continuation outside it.
pub fn eval_u_bar(p: &ProfileSolution, fan: &CharacteristicFan, x: f64, t: f64) -> Result<f64> {
    let x = x.abs();
    let s = state_at(p, t)?;
    if x == 0.0 {
        return Ok(s.k);
    }
    if x <= s.l {
        return Ok(s.k + 0.5 * s.a * x * x);
    }
    let last = fan.t0.partition_point(|&t0| t0 < t);
    if last == 0 {
        return match fan.kind {
            ProfileKind::Eta { eta } => Ok(x * x / (2.0 * (t + eta))),
            ProfileKind::Limit => Err(Error::RootSearch { x, t }),
        };
    }
    if fan.residual(0, x, t) < 0.0 {
        return match fan.kind {
            ProfileKind::Eta { eta } => Ok(x * x / (2.0 * (t + eta))),
            ProfileKind::Limit => Ok(initial_asymptote(x, t, fan.t0[0])),
        };
    }
    // Largest sample index with a nonnegative residual.
    let (mut lo, mut hi) = (0, last);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fan.residual(mid, x, t) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut foot = fan.t0[lo];
    let mut bound = if lo + 1 < last {
        fan.t0[lo + 1]
    } else {
        t.min(p.t_hi())
    };
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (foot + bound);
        if mid <= foot || mid >= bound {
            break;
        }
        let (l, l_dot, _) = boundary(&p.at(mid)?);
        if l + (t - mid) * l_dot - x >= 0.0 {
            foot = mid;
        } else {
            bound = mid;
        }
    }
    if t - foot <= 0.0 {
        return Err(Error::RootSearch { x, t });
    }
    let (l, _, u) = boundary(&p.at(foot)?);
    Ok(u + (x - l).powi(2) / (2.0 * (t - foot)))
}
