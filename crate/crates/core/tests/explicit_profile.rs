use mfg_planning::explicit::{
    eval_rho_bar, eval_u_bar, integrate_eta_profile, integrate_limit_profile,
    rate_functional_of_profile, CharacteristicFan, ProfileSolution,
};
use mfg_planning::numerics::SpaceTimeGrid;
use std::f64::consts::PI;

/// Time for a trajectory of the profile equations to go from its turning
/// value `r_min` up to `r_top`, from the first integral
/// `a^2 = (64/9) r^2 (r - r_min)` and the substitution `r = r_min + s^2`.
fn travel_time(r_min: f64, r_top: f64) -> f64 {
    let c = r_min;
    let s = (r_top - r_min).sqrt();
    let rational = if s.is_finite() {
        s / (2.0 * c * (c + s * s))
    } else {
        0.0
    };
    0.75 * (rational + (s / c.sqrt()).atan() / (2.0 * c.powf(1.5)))
}

/// Initial peak of the penalized profile from the closed-form shooting
/// relations, solved by bisection.
fn closed_form_start(eta: f64) -> f64 {
    let r_min = |r0: f64| r0 - 9.0 / (64.0 * eta * eta * r0 * r0);
    let total = |r0: f64| {
        let m = r_min(r0);
        travel_time(m, r0) + travel_time(m, f64::INFINITY)
    };
    let (mut lo, mut hi) = (0.5 * (9.0 / (64.0 * eta * eta)).cbrt() + 1e-9, 1e4);
    while r_min(lo) <= 0.0 {
        lo *= 1.01;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn limit() -> ProfileSolution {
    integrate_limit_profile(2000, 1e-6).unwrap()
}

#[test]
fn turning_density_gives_symmetric_blow_up() {
    let r1 = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    assert!((travel_time(r1, f64::INFINITY) - 0.5).abs() < 1e-14);
    let p = limit();
    assert!((eval_rho_bar(&p, 0.0, 0.5).unwrap() - r1).abs() < 1e-12);
    assert!((r1 - 1.115_460_237_2).abs() < 1e-9);
}

#[test]
fn mass_product_and_symmetry() {
    let p = limit();
    for s in &p.samples {
        assert!((s.r * s.l - 0.75).abs() < 1e-8);
    }
    let n = p.samples.len();
    for i in 0..n / 2 {
        let (a, b) = (&p.samples[i], &p.samples[n - 1 - i]);
        assert!((a.t + b.t - 1.0).abs() < 1e-12);
        assert!(
            (a.r - b.r).abs() <= 1e-6 * a.r.max(1.0),
            "t={}: {} vs {}",
            a.t,
            a.r,
            b.r
        );
    }
}

#[test]
fn blow_up_asymptotics() {
    let p = limit();
    let s = p.at(1e-3).unwrap();
    assert!((s.r * (4.0e-3f64).powf(2.0 / 3.0) - 1.0).abs() < 0.05);
    assert!((s.a * 1e-3 / (2.0 / 3.0) - 1.0).abs() < 0.05);
    let first = p.samples[0];
    assert!((first.r * (4.0 * first.t).powf(2.0 / 3.0) - 1.0).abs() < 1e-3);
}

#[test]
fn quadratic_coefficient_exceeds_free_cone() {
    let p = limit();
    for s in p.samples.iter().filter(|s| s.t <= 0.01) {
        assert!(s.a * s.t > 0.5, "t={}", s.t);
    }
}

#[test]
fn terminal_value_is_integral_of_peak() {
    let p = limit();
    let r1 = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    // k(1/2) = integral of r over (0, 1/2) = travel-time symmetric half.
    assert!((p.at(0.5).unwrap().k - r1).abs() < 1e-6);
    assert!((p.k_terminal - 2.0 * r1).abs() < 1e-6);
}

#[test]
fn slice_mass_at_half() {
    let p = limit();
    let g = SpaceTimeGrid::new(3.0, 401, 400).unwrap();
    let mass: f64 = g
        .xs()
        .iter()
        .map(|&x| eval_rho_bar(&p, x, 0.5).unwrap())
        .sum::<f64>()
        * g.dx();
    assert!((mass - 1.0).abs() < 1e-4, "{mass}");
    assert_eq!(eval_rho_bar(&p, 1.2, 0.5).unwrap(), 0.0);
}

#[test]
fn value_dominates_free_cone() {
    let p = limit();
    let fan = CharacteristicFan::new(&p);
    let g = SpaceTimeGrid::new(3.0, 201, 100).unwrap();
    for n in 1..=g.n_t() {
        let t = g.t(n);
        for x in g.xs() {
            let u = eval_u_bar(&p, &fan, x, t).unwrap();
            assert!(u >= x * x / (2.0 * t) - 1e-9, "x={x} t={t}: {u}");
        }
    }
}

#[test]
fn limit_rate_matches_reduced_integral() {
    let p = limit();
    let r1 = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    // Reduced integrand 1/2 [(4/5) r + (1/5) a^2 l^2], with the x-integrals
    // done by hand; the same trapezoid over samples plus the blow-up tails.
    let f = |r: f64, a: f64| 0.5 * (0.8 * r + 0.2 * a * a * (0.75 / r).powi(2));
    let mut reduced = 0.0;
    for w in p.samples.windows(2) {
        reduced += 0.5 * (w[1].t - w[0].t) * (f(w[0].r, w[0].a) + f(w[1].r, w[1].a));
    }
    let tail = |tau: f64| 0.8 * 3.0 * tau.cbrt() / 4.0f64.powf(2.0 / 3.0);
    reduced += tail(p.t_lo()) + tail(1.0 - p.t_hi());
    let value = rate_functional_of_profile(&p);
    assert!((value / reduced - 1.0).abs() < 1e-4, "{value} vs {reduced}");
    assert!(
        (value / (1.2 * r1) - 1.0).abs() < 1e-4,
        "{value} vs {}",
        1.2 * r1
    );
}

#[test]
fn brute_force_slice_cost() {
    // Fine midpoint rule in x at a few slices versus the exact reduction.
    let p = limit();
    for &t in &[0.2, 0.5, 0.9] {
        let s = p.at(t).unwrap();
        let n = 200_000;
        let h = 2.0 * s.l / n as f64;
        let brute: f64 = (0..n)
            .map(|i| {
                let x = -s.l + (i as f64 + 0.5) * h;
                let rho = s.rho(x);
                0.5 * (rho * rho + rho * (s.a * x).powi(2)) * h
            })
            .sum();
        let reduced = 0.5 * (0.8 * s.r + 0.2 * s.a * s.a * s.l * s.l);
        assert!((brute / reduced - 1.0).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn eta_profile_matches_closed_form_shooting() {
    for &eta in &[0.2, 0.05, 0.01] {
        let p = integrate_eta_profile(eta, 2000).unwrap();
        let r0 = p.matching.r_start.unwrap();
        let expected = closed_form_start(eta);
        assert!(
            (r0 / expected - 1.0).abs() < 1e-6,
            "eta={eta}: {r0} vs {expected}"
        );
        assert!((p.samples[0].a * eta - 1.0).abs() < 1e-15);
        let t_turn = travel_time(p.matching.r_turn, r0);
        assert!((p.matching.t_turn - t_turn).abs() < 1e-5, "eta={eta}");
    }
}

#[test]
fn eta_profile_approaches_limit() {
    let r1 = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    let p = integrate_eta_profile(1e-3, 2000).unwrap();
    let r_half = p.at(0.5).unwrap().r;
    assert!((r_half / r1 - 1.0).abs() < 0.02, "{r_half}");
}

#[test]
fn eta_value_dominates_penalized_cone() {
    let eta = 0.05;
    let p = integrate_eta_profile(eta, 1000).unwrap();
    let fan = CharacteristicFan::new(&p);
    let g = SpaceTimeGrid::new(3.0, 121, 60).unwrap();
    for n in 0..=g.n_t() {
        let t = g.t(n);
        for x in g.xs() {
            let u = eval_u_bar(&p, &fan, x, t).unwrap();
            assert!(u >= x * x / (2.0 * (t + eta)) - 1e-9, "x={x} t={t}: {u}");
        }
    }
}

#[test]
fn eta_rate_increases_towards_limit() {
    let limit_value = rate_functional_of_profile(&limit());
    let values: Vec<f64> = [0.1, 0.05, 0.025, 0.01]
        .iter()
        .map(|&eta| rate_functional_of_profile(&integrate_eta_profile(eta, 1000).unwrap()))
        .collect();
    for w in values.windows(2) {
        assert!(w[1] > w[0], "{values:?}");
    }
    assert!(values.iter().all(|&v| v < limit_value));
    assert!(
        (values[3] / limit_value - 1.0).abs() < 0.1,
        "{values:?} vs {limit_value}"
    );
}
