use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("s must lie in (1/2,1), got {0}")]
    OrderOutOfRange(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field evaluated to a non-finite value {value} at {x:?}")]
    NonFinite { x: Vec<f64>, value: f64 },

    #[error("|φ(x)| = {value} exceeds the declared bound {bound} at {x:?}")]
    BoundExceeded { x: Vec<f64>, value: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),

    #[error("analytic constant tail requires a constant far field")]
    TailMismatch,

    #[error("direction {y:?} is not a unit vector")]
    NotUnit { y: Vec<f64> },

    #[error("ray integral along {y:?} is not finite")]
    NonFiniteRay { y: Vec<f64> },

    #[error("integrand is not C^1,1 at {x:?} along {y:?}: inner panel sums grow toward η = 0")]
    NotC11 { x: Vec<f64>, y: Vec<f64> },

    #[error("scheme produced a non-finite value at node {node:?} (step {step})")]
    SchemeAbort { node: Vec<f64>, step: usize },

    #[error("time {t} outside trajectory range [0, {t_end}]")]
    TimeOutOfRange { t: f64, t_end: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile value {value} at r = {r} is negative; Fourier inversion under-resolved")]
    NegativeProfile { r: f64, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
