//! Parameter sweeps towards the first-order limit and their diagnostics.
//!
//! A [`SweepPlan`] lists `(eps, eta)` points on a coupling curve
//! `eps = c eta^alpha`. [`run_sweep`] solves the viscous system at each point
//! and compares it with the penalized and the limit explicit profiles:
//! `L^2` distances of the densities, the gap between the actions, the
//! local-uniform error of the value function, the viscous cross terms of
//! the comparison identity, and the KPZ rescaling record. Trend verdicts are
//! computed from the archived numbers.

mod diagnostics;
mod kpz;
mod plan;
mod report;
mod sweep;

pub use diagnostics::{
    cross_terms, local_uniform_u_error, uniqueness_identity_check, CrossTerms, PlanningState,
    UWindow,
};
pub use kpz::{kpz_rescale_diagnostics, KpzExponents, KpzRecord};
pub use plan::{GridMode, GridSpec, ReferenceSpec, SweepPlan};
pub use report::{
    trend_verdict, ExperimentReport, LimitReference, PointMetrics, PointRecord, PointStatus,
    TrendVerdict, Verdicts,
};
pub use sweep::{run_point, run_sweep, LimitData};
