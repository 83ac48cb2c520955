use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("near-zero pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("mollifier width {width} is below the grid spacing {dx}")]
    UnderResolved { width: f64, dx: f64 },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside sampled range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("ODE integration stopped at t = {t}: {reason}")]
    OdeFailure { t: f64, reason: String },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("characteristic root search failed at (x = {x}, t = {t})")]
    RootSearch { x: f64, t: f64 },

    #[error("refine time grid: CFL number {cfl:.3} exceeds 1 at step {step}")]
    Cfl { cfl: f64, step: usize },

    #[error("mass drift {drift:e} at time slice {slice}")]
    MassDrift { drift: f64, slice: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
