use std::io::Write;

use serde::{Deserialize, Serialize};

use super::diagnostics::CrossTerms;
use super::kpz::KpzRecord;
use super::plan::{GridSpec, SweepPlan};
use crate::variational::FunctionalValue;
use crate::Result;

/// Limit quantities every point is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReference {
    /// `k(1) = u_bar(0, 1)`.
    pub k_terminal: f64,
    /// Profile action under the plan's weights.
    pub action: f64,
    /// Turning density at `t = 1/2`.
    pub r_turn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "message")]
pub enum PointStatus {
    Ok,
    NonConverged,
    Failed(String),
}

/// Numbers measured at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub iterations: usize,
    pub final_update_norm: f64,
    /// `||rho - rho_bar_eta||` in `L^2(R x (0,1))`.
    pub l2_to_eta_profile: f64,
    /// `||rho - rho_bar||` in `L^2(R x (0,1))`.
    pub l2_to_limit: f64,
    /// Action of the viscous pair, penalty included.
    pub action: FunctionalValue,
    /// `|I - I_bar|`.
    pub action_error: f64,
    /// Largest `|u - u_bar|` on the plan's window.
    pub u_error: f64,
    /// Cross terms against the penalized profile.
    pub cross: CrossTerms,
    /// Comparison-identity form against the penalized profile.
    pub uniqueness_form: f64,
    pub kpz: Option<KpzRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub eps: f64,
    pub eta: f64,
    pub grid: GridSpec,
    pub status: PointStatus,
    pub metrics: Option<PointMetrics>,
    pub wall_time_s: Option<f64>,
}

impl PointRecord {
    fn usable(&self) -> Option<&PointMetrics> {
        match self.status {
            PointStatus::Ok => self.metrics.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendVerdict {
    Decreasing,
    NotDecreasing,
    InsufficientPoints,
}

impl TrendVerdict {
    pub fn failed(&self) -> bool {
        *self == TrendVerdict::NotDecreasing
    }
}

/// Strict decrease along `values`, each step allowed to rise by at most
/// `slack` times the previous value. Fewer than three values give no verdict.
pub fn trend_verdict(values: &[f64], slack: f64) -> TrendVerdict {
    if values.len() < 3 {
        return TrendVerdict::InsufficientPoints;
    }
    let ok = values.iter().all(|v| v.is_finite())
        && values.windows(2).all(|w| w[1] < w[0] + slack * w[0].abs());
    if ok {
        TrendVerdict::Decreasing
    } else {
        TrendVerdict::NotDecreasing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub l2_to_limit: TrendVerdict,
    pub l2_to_eta_profile: TrendVerdict,
    pub action_error: TrendVerdict,
    pub u_error: TrendVerdict,
    pub cross_rho_uxx: TrendVerdict,
    pub cross_uxx_rho: TrendVerdict,
    pub a_error: TrendVerdict,
    /// Trend of `|mu - 1|`.
    pub mu_error: TrendVerdict,
}

impl Verdicts {
    pub fn from_records(records: &[PointRecord], slack: f64) -> Self {
        let all: Option<Vec<&PointMetrics>> = records.iter().map(PointRecord::usable).collect();
        let series = |f: &dyn Fn(&PointMetrics) -> Option<f64>| -> TrendVerdict {
            match &all {
                // A failed point breaks the trend.
                None if records.len() >= 3 => TrendVerdict::NotDecreasing,
                None => TrendVerdict::InsufficientPoints,
                Some(m) => match m.iter().map(|m| f(m)).collect::<Option<Vec<f64>>>() {
                    Some(v) => trend_verdict(&v, slack),
                    None => TrendVerdict::NotDecreasing,
                },
            }
        };
        Self {
            l2_to_limit: series(&|m| Some(m.l2_to_limit)),
            l2_to_eta_profile: series(&|m| Some(m.l2_to_eta_profile)),
            action_error: series(&|m| Some(m.action_error)),
            u_error: series(&|m| Some(m.u_error)),
            cross_rho_uxx: series(&|m| Some(m.cross.rho_uxx_ref.abs())),
            cross_uxx_rho: series(&|m| Some(m.cross.uxx_rho_ref.abs())),
            a_error: series(&|m| m.kpz.map(|k| k.a_error)),
            mu_error: series(&|m| m.kpz.map(|k| (k.mu - 1.0).abs())),
        }
    }

    pub fn all(&self) -> [(&'static str, TrendVerdict); 8] {
        [
            ("l2_to_limit", self.l2_to_limit),
            ("l2_to_eta_profile", self.l2_to_eta_profile),
            ("action_error", self.action_error),
            ("u_error", self.u_error),
            ("cross_rho_uxx", self.cross_rho_uxx),
            ("cross_uxx_rho", self.cross_uxx_rho),
            ("a_error", self.a_error),
            ("mu_error", self.mu_error),
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.all().iter().any(|(_, v)| v.failed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub plan: SweepPlan,
    pub limit: LimitReference,
    pub records: Vec<PointRecord>,
    pub verdicts: Verdicts,
}

const CSV_HEADER: [&str; 20] = [
    "index",
    "eps",
    "eta",
    "n_x",
    "n_t",
    "status",
    "iterations",
    "final_update_norm",
    "l2_to_eta_profile",
    "l2_to_limit",
    "action",
    "action_error",
    "u_error",
    "cross_rho_uxx",
    "cross_uxx_rho",
    "uniqueness_form",
    "a_value",
    "a_error",
    "mu",
    "wall_time_s",
];

impl ExperimentReport {
    pub fn failed_points(&self) -> Vec<&PointRecord> {
        self.records
            .iter()
            .filter(|r| r.status != PointStatus::Ok)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per point; missing numbers are left empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", CSV_HEADER.join(","))?;
        let num = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:e}"));
        for r in &self.records {
            let m = r.metrics.as_ref();
            let k = m.and_then(|m| m.kpz);
            let status = match &r.status {
                PointStatus::Ok => "ok",
                PointStatus::NonConverged => "non-converged",
                PointStatus::Failed(_) => "failed",
            };
            let row = [
                r.index.to_string(),
                format!("{:e}", r.eps),
                format!("{:e}", r.eta),
                r.grid.n_x.to_string(),
                r.grid.n_t.to_string(),
                status.to_string(),
                m.map_or(String::new(), |m| m.iterations.to_string()),
                num(m.map(|m| m.final_update_norm)),
                num(m.map(|m| m.l2_to_eta_profile)),
                num(m.map(|m| m.l2_to_limit)),
                num(m.map(|m| m.action.total)),
                num(m.map(|m| m.action_error)),
                num(m.map(|m| m.u_error)),
                num(m.map(|m| m.cross.rho_uxx_ref)),
                num(m.map(|m| m.cross.uxx_rho_ref)),
                num(m.map(|m| m.uniqueness_form)),
                num(k.map(|k| k.a_value)),
                num(k.map(|k| k.a_error)),
                num(k.map(|k| k.mu)),
                num(r.wall_time_s),
            ];
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
