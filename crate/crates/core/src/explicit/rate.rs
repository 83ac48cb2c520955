use super::profile::{ProfileKind, ProfileSample, ProfileSolution};
use super::singular_tail_mass;
use crate::numerics::gauss_legendre;

fn over_support(s: &ProfileSample, f: impl Fn(f64, f64) -> f64) -> f64 {
    gauss_legendre(-s.l, s.l, |x| f(x, s.rho(x)))
}

/// `(int rho^2 / 2, int rho (u_x)^2 / 2)` for one slice, with `u_x = a x`.
fn slice_parts(s: &ProfileSample) -> (f64, f64) {
    (
        over_support(s, |_, rho| 0.5 * rho * rho),
        over_support(s, |x, rho| 0.5 * rho * (s.a * x).powi(2)),
    )
}

/// Congestion and kinetic parts of the profile cost,
/// `int int rho^2 / 2` and `int int beta^2 / (2 rho)` with `beta = rho u_x`.
/// The initial penalty of the penalized kind is not included.
///
/// Spatial integrals are exact on the parabolic support; the time integral is
/// trapezoidal over the ODE samples. Near a blow-up endpoint the slice costs
/// both behave like `(2/5) (4 s)^(-2/3)`; slices within the floor distance
/// are added in closed form.
pub fn rate_parts_of_profile(p: &ProfileSolution) -> (f64, f64) {
    let (mut cong, mut kin) = (0.0, 0.0);
    for w in p.samples.windows(2) {
        let (c0, k0) = slice_parts(&w[0]);
        let (c1, k1) = slice_parts(&w[1]);
        let h = 0.5 * (w[1].t - w[0].t);
        cong += h * (c0 + c1);
        kin += h * (k0 + k1);
    }
    let mut tail = singular_tail_mass(1.0 - p.t_hi());
    if p.kind == ProfileKind::Limit {
        tail += singular_tail_mass(p.t_lo());
    }
    (cong + 0.4 * tail, kin + 0.4 * tail)
}

/// Cost of the explicit profile, `int int 1/2 (rho^2 + beta^2 / rho)`, plus
/// the initial penalty `int rho(x, 0) x^2 / (2 eta)` for the penalized kind.
pub fn rate_functional_of_profile(p: &ProfileSolution) -> f64 {
    let (cong, kin) = rate_parts_of_profile(p);
    let penalty = match p.kind {
        ProfileKind::Limit => 0.0,
        ProfileKind::Eta { eta } => over_support(&p.samples[0], |x, rho| rho * x * x / (2.0 * eta)),
    };
    cong + kin + penalty
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_quartics() {
        let s = ProfileSample {
            t: 0.0,
            k: 0.0,
            r: 0.75,
            l: 1.0,
            a: 0.0,
        };
        let m: f64 = over_support(&s, |_, rho| rho);
        let q: f64 = over_support(&s, |_, rho| rho * rho);
        assert!((m - 1.0).abs() < 1e-14);
        assert!((q - 0.5625 * 16.0 / 15.0).abs() < 1e-14);
    }
}
