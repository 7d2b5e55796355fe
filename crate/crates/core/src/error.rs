use thiserror::Error;

/// Errors produced while building or certifying a model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector field is not transverse: min of sum(nu) = {min:.6e} at theta = {theta:?}")]
    TransversalityViolation { min: f64, theta: Vec<f64> },

    #[error("unsupported invariant set: {0}")]
    UnsupportedSet(String),

    #[error("invariant set drifted by {drift:.3e} (tolerance {tol:.3e})")]
    InvarianceViolation { drift: f64, tol: f64 },

    #[error("point outside the polar domain: {0}")]
    Domain(String),

    #[error("matrix A(b) is not positive definite (min eigenvalue {min_eig:.6e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("region-L margin is negative ({margin:.6e}) at r = {r:?}, theta = {theta:?}")]
    MarginNegative {
        margin: f64,
        r: Vec<f64>,
        theta: Vec<f64>,
    },

    #[error("no admissible b up to {cap}")]
    SearchExhausted { cap: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("ramp for G cannot be fitted: {0}")]
    InfeasibleRamp(String),

    #[error("H differs from 1 by {deviation:.3e} on the support shell at {witness:?}")]
    ShellViolation { deviation: f64, witness: Vec<f64> },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit {
        max_steps: usize,
        t: f64,
        state: Vec<f64>,
    },

    #[error("step size underflow (h = {h:.3e}) at t = {t}")]
    StepUnderflow { h: f64, t: f64, state: Vec<f64> },

    #[error("dz rate {rate:.6e} is not positive at {witness:?}")]
    MonotonicityViolation { rate: f64, witness: Vec<f64> },

    #[error("family endpoints classify identically ({0})")]
    NoBracket(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
