"""Smoke test of the Python bindings.

Build and install first, from this crate's directory:

    pip install -e . --no-build-isolation
"""

import json
import math

import mfg_planning as mfg


def main():
    limit = mfg.limit_profile()
    assert limit.is_limit and limit.eta is None
    assert abs(limit.t_turn - 0.5) < 1e-12
    assert abs(limit.r_turn - (3 * math.pi / 8) ** (2 / 3)) < 1e-9
    for t, _, r, l, _ in limit.samples()[::50]:
        assert abs(r * l - 0.75) < 1e-8, t
    assert limit.rho(0.0, 0.5) == limit.r_turn
    assert abs(limit.u_bar(0.0, 1.0) - limit.k_terminal) < 1e-12
    print(f"r1 = {limit.r_turn:.10f}, k(1) = {limit.k_terminal:.6f}, I_bar = {limit.action():.6f}")

    eta = mfg.eta_profile(0.05)
    assert abs(eta.samples()[0][4] - 20.0) < 1e-12
    try:
        mfg.eta_profile(0.9)
    except ValueError:
        pass
    else:
        raise AssertionError("eta = 0.9 accepted")

    grid = mfg.Grid(3.0, 101, 100)
    sol = mfg.solve(0.05, 0.1, grid)
    assert sol.converged, sol.iterations
    assert max(abs(m - 1.0) for m in sol.masses()) < 1e-10
    rho = sol.rho()
    assert len(rho) == grid.n_t + 1 and len(rho[0]) == grid.n_x
    assert min(min(row) for row in rho) >= 0.0
    print(f"solve: {sol.iterations} iterations, A = {sol.value_at_origin():.6f}, I = {sol.action():.6f}")

    report, rho = mfg.minimize_first_order(mfg.Grid(3.0, 51, 50))
    report = json.loads(report)
    assert report["converged"] and report["relative_gap"] < 1e-4
    print(f"minimize: gap {report['relative_gap']:.2e}, total {report['total']:.6f}")

    sweep = json.loads(mfg.run_sweep([0.2, 0.1, 0.05], n_x=201, n_t=200))
    verdicts = sweep["verdicts"]
    assert verdicts["l2_to_limit"] == "decreasing", verdicts
    assert verdicts["mu_error"] == "decreasing", verdicts
    print("sweep verdicts:", ", ".join(f"{k}={v}" for k, v in verdicts.items()))
    print("smoke test passed")


if __name__ == "__main__":
    main()
