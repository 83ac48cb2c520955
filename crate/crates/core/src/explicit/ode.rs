/// Coefficient of `r^3` in the equation for the quadratic coefficient `a`.
pub const CONGESTION_COEFF: f64 = 32.0 / 9.0;

/// Whether the support is still widening (`a > 0`) or already contracting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Spreading,
    Focusing,
}

/// State `(t, k, r, a)` of the profile equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOde {
    pub t: f64,
    pub k: f64,
    pub r: f64,
    pub a: f64,
}

impl ProfileOde {
    pub fn new(t: f64, k: f64, r: f64, a: f64) -> Self {
        Self { t, k, r, a }
    }

    /// Right-hand side `(k', r', a')`.
    pub fn derivative(&self) -> (f64, f64, f64) {
        rhs(self.r, self.a)
    }

    pub fn phase(&self) -> Phase {
        if self.a > 0.0 {
            Phase::Spreading
        } else {
            Phase::Focusing
        }
    }

    /// Support half-width `l = 3 / (4 r)`.
    pub fn half_width(&self) -> f64 {
        0.75 / self.r
    }

    /// `r_min` from the first integral `a^2 = (64/9) r^2 (r - r_min)`.
    pub fn turning_density(&self) -> f64 {
        self.r - 9.0 * self.a * self.a / (64.0 * self.r * self.r)
    }

    pub fn is_finite(&self) -> bool {
        self.k.is_finite() && self.r.is_finite() && self.a.is_finite()
    }

    /// One classical Runge-Kutta step of signed length `h`.
    pub fn rk4_step(&self, h: f64) -> Self {
        let (k1, r1, a1) = rhs(self.r, self.a);
        let (k2, r2, a2) = rhs(self.r + 0.5 * h * r1, self.a + 0.5 * h * a1);
        let (k3, r3, a3) = rhs(self.r + 0.5 * h * r2, self.a + 0.5 * h * a2);
        let (k4, r4, a4) = rhs(self.r + h * r3, self.a + h * a3);
        Self {
            t: self.t + h,
            k: self.k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
            r: self.r + h / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4),
            a: self.a + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        }
    }
}

fn rhs(r: f64, a: f64) -> (f64, f64, f64) {
    (r, -a * r, -(a * a + CONGESTION_COEFF * r * r * r))
}

/// Step-size rule: uniform steps of `h_max` in the interior, shrinking in
/// proportion to the local time scale `1 / (|a| + (8/3) r^(3/2))` near the
/// blow-up endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub h_max: f64,
    pub relative: f64,
}

impl StepControl {
    pub fn new(n_steps: usize) -> Self {
        Self {
            h_max: 1.0 / n_steps as f64,
            relative: 5e-3,
        }
    }

    pub fn step(&self, s: &ProfileOde) -> f64 {
        let rate = s.a.abs() + (8.0 / 3.0) * s.r.max(0.0).powf(1.5);
        if rate > 0.0 {
            self.h_max.min(self.relative / rate)
        } else {
            self.h_max
        }
    }
}

/// Outcome of a single integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stop {
    /// Reached the requested end time exactly.
    Reached,
    /// `r` exceeded the blow-up threshold.
    BlowUp,
    /// Step size underflowed before the end time.
    Underflow,
}

/// Integrates from `start` towards `t_end` (in either direction), recording
/// every accepted state. Stops early if `r` exceeds `r_stop`.
pub(crate) fn integrate(
    start: ProfileOde,
    t_end: f64,
    ctrl: &StepControl,
    r_stop: f64,
) -> (Vec<ProfileOde>, Stop) {
    let dir = if t_end >= start.t { 1.0 } else { -1.0 };
    let mut states = vec![start];
    let mut s = start;
    loop {
        let remaining = (t_end - s.t) * dir;
        if remaining <= 0.0 {
            return (states, Stop::Reached);
        }
        let mut h = ctrl.step(&s);
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < 1e-15 * s.t.abs().max(1.0) && !last {
            return (states, Stop::Underflow);
        }
        let mut next = s.rk4_step(dir * h);
        if last {
            next.t = t_end;
        }
        if !next.is_finite() || next.r <= 0.0 {
            return (states, Stop::Underflow);
        }
        states.push(next);
        s = next;
        if s.r > r_stop {
            return (states, Stop::BlowUp);
        }
        if last {
            return (states, Stop::Reached);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_integral_is_conserved() {
        let r_min = (3.0 * std::f64::consts::PI / 8.0).powf(2.0 / 3.0);
        let start = ProfileOde::new(0.5, 0.0, r_min, 0.0);
        let (states, stop) = integrate(start, 1e-4, &StepControl::new(1000), f64::INFINITY);
        assert_eq!(stop, Stop::Reached);
        for s in &states {
            assert!((s.turning_density() - r_min).abs() < 1e-8 * s.r, "{:?}", s);
        }
    }

    #[test]
    fn reversibility_mirrors_the_state() {
        let s = ProfileOde::new(0.3, 0.1, 1.4, 0.7);
        let fwd = s.rk4_step(0.01);
        let mirror = ProfileOde::new(-0.3, -0.1, 1.4, -0.7).rk4_step(-0.01);
        assert_eq!(fwd.r, mirror.r);
        assert_eq!(fwd.a, -mirror.a);
        assert_eq!(fwd.k, -mirror.k);
    }

    #[test]
    fn phase_follows_sign_of_a() {
        assert_eq!(
            ProfileOde::new(0.1, 0.0, 1.0, 2.0).phase(),
            Phase::Spreading
        );
        assert_eq!(
            ProfileOde::new(0.9, 0.0, 1.0, -2.0).phase(),
            Phase::Focusing
        );
    }
}
