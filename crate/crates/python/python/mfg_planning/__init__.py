"""Solvers for the 1-D planning problem with Dirac endpoints."""

from ._native import (
    Grid,
    Profile,
    ViscousSolution,
    eta_profile,
    limit_profile,
    minimize_first_order,
    run_sweep,
    solve,
)

__all__ = [
    "Grid",
    "Profile",
    "ViscousSolution",
    "eta_profile",
    "limit_profile",
    "minimize_first_order",
    "run_sweep",
    "solve",
]
