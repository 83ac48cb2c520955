use mfg_planning::explicit::{integrate_eta_profile, integrate_limit_profile, CharacteristicFan};
use mfg_planning::lab::{
    kpz_rescale_diagnostics, local_uniform_u_error, run_sweep, uniqueness_identity_check,
    ExperimentReport, GridSpec, KpzExponents, PlanningState, PointStatus, SweepPlan, TrendVerdict,
    UWindow,
};
use mfg_planning::numerics::{MollifiedDirac, SpaceTimeGrid};
use mfg_planning::viscous::{
    solve_fixed_point, Coupling, SolverOptions, ViscousParams, ViscousSolution,
};

fn default_plan() -> SweepPlan {
    SweepPlan::coupled(
        &[0.2, 0.1, 0.05, 0.025],
        Coupling::default(),
        GridSpec::default(),
    )
    .unwrap()
}

fn solve(eps: f64, eta: f64, g: &SpaceTimeGrid) -> ViscousSolution {
    let d = MollifiedDirac::grid_gaussian(g, 2.0);
    solve_fixed_point(
        &ViscousParams::new(eps, eta).unwrap(),
        g,
        &d,
        &SolverOptions::default(),
    )
    .unwrap()
}

#[test]
fn default_sweep_trends_decrease() {
    let rep = run_sweep(&default_plan()).unwrap();
    assert!(rep.failed_points().is_empty());
    for (name, v) in rep.verdicts.all() {
        assert_eq!(v, TrendVerdict::Decreasing, "{name}");
    }
    for r in &rep.records {
        let m = r.metrics.unwrap();
        assert!(m.uniqueness_form > 0.0);
        assert!(r.wall_time_s.is_none());
    }
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let mut plan = SweepPlan::coupled(
        &[0.2, 0.1],
        Coupling::default(),
        GridSpec {
            n_x: 101,
            n_t: 100,
            ..GridSpec::default()
        },
    )
    .unwrap();
    let a = run_sweep(&plan).unwrap();
    plan.workers = 1;
    let b = run_sweep(&plan).unwrap();
    assert_eq!(a.records, b.records);
    let json = a.to_json().unwrap();
    assert_eq!(ExperimentReport::from_json(&json).unwrap(), a);
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
    assert_eq!(a.verdicts.l2_to_limit, TrendVerdict::InsufficientPoints);
}

#[test]
fn failed_point_is_recorded() {
    let plan = SweepPlan::coupled(
        &[0.1],
        Coupling::default(),
        GridSpec {
            n_x: 101,
            n_t: 100,
            dirac_multiple: 0.25,
            ..GridSpec::default()
        },
    )
    .unwrap();
    let rep = run_sweep(&plan).unwrap();
    assert!(matches!(rep.records[0].status, PointStatus::Failed(_)));
    assert!(rep.records[0].metrics.is_none());
}

#[test]
fn single_node_window_gives_value_error_at_origin() {
    let g = SpaceTimeGrid::new(3.0, 201, 200).unwrap();
    let s = solve(0.05, 0.05, &g);
    let p = integrate_limit_profile(2000, 1e-6).unwrap();
    let fan = CharacteristicFan::new(&p);
    let w = UWindow {
        x_lo: 0.0,
        x_hi: 0.0,
        t_lo: 1.0,
        t_hi: 1.0,
    };
    let err = local_uniform_u_error(&s, &g, &p, &fan, &w).unwrap();
    assert_eq!(err, (s.u.values[[200, 100]] - p.k_terminal).abs());
    let early = UWindow {
        t_lo: 0.05,
        ..UWindow::default()
    };
    assert!(local_uniform_u_error(&s, &g, &p, &fan, &early).is_err());
}

#[test]
fn comparison_form_vanishes_on_identical_inputs_and_is_positive_otherwise() {
    let g = SpaceTimeGrid::new(3.0, 201, 200).unwrap();
    let d = MollifiedDirac::grid_gaussian(&g, 2.0);
    let s = PlanningState::from_solution(&solve(0.05, 0.05, &g));
    let p =
        PlanningState::from_profile(&integrate_eta_profile(0.05, 2000).unwrap(), &g, &d).unwrap();
    assert_eq!(uniqueness_identity_check(&s, &s, &g, 0.1).unwrap(), 0.0);
    assert!(uniqueness_identity_check(&s, &p, &g, 0.1).unwrap() > 0.0);
    let limit = integrate_limit_profile(2000, 1e-6).unwrap();
    assert!(PlanningState::from_profile(&limit, &g, &d).is_err());
}

#[test]
fn value_at_origin_is_stable_in_eta() {
    // Halving eta at fixed eps moves A(eps, eta) less than the joint sweep
    // step from (0.1, 0.1) to (0.05, 0.05).
    let g = SpaceTimeGrid::new(3.0, 401, 400).unwrap();
    let a = |e: f64, eta: f64| solve(e, eta, &g).u.values[[400, 200]];
    let fixed_eps = (a(0.05, 0.05) - a(0.05, 0.1)).abs();
    let joint = (a(0.05, 0.05) - a(0.1, 0.1)).abs();
    assert!(fixed_eps < joint, "{fixed_eps} vs {joint}");
}

#[test]
fn mu_tends_to_one_for_any_gamma() {
    let g = SpaceTimeGrid::new(3.0, 201, 200).unwrap();
    let k1 = integrate_limit_profile(2000, 1e-6).unwrap().k_terminal;
    let sols: Vec<ViscousSolution> = [0.2, 0.1, 0.05].iter().map(|&e| solve(e, e, &g)).collect();
    for gamma in [0.5, 1.0, 3.0] {
        let e = KpzExponents {
            gamma,
            ..KpzExponents::default()
        };
        let dev: Vec<f64> = sols
            .iter()
            .map(|s| (kpz_rescale_diagnostics(s, &g, 1.0, k1, &e).unwrap().mu - 1.0).abs())
            .collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]), "γ={gamma}: {dev:?}");
    }
}

#[test]
fn kpz_record_needs_convergence() {
    let g = SpaceTimeGrid::new(3.0, 101, 100).unwrap();
    let opts = SolverOptions {
        tol: 1e-30,
        max_iter: 1,
        ..Default::default()
    };
    let d = MollifiedDirac::grid_gaussian(&g, 2.0);
    let s = solve_fixed_point(&ViscousParams::new(0.1, 0.1).unwrap(), &g, &d, &opts).unwrap();
    assert!(kpz_rescale_diagnostics(&s, &g, 1.0, 2.0, &KpzExponents::default()).is_err());
}
