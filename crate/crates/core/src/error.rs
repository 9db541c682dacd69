use thiserror::Error;

/// Errors raised by the analysis, simulation and measurement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChatterError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singularity(String),

    /// The LSV loop has no oscillation when `2 mu b >= 1`; the bound is `1/(2b)`.
    #[error("stability violation: mu = {mu} is not below the bound 1/(2b) = {bound}")]
    StabilityViolation { mu: f64, bound: f64 },

    #[error("Newton iterate hit the domain boundary after {iterations} iterations: {reason}")]
    BoundaryFailure { iterations: usize, reason: String },

    #[error("trajectory diverged at t = {at} s")]
    Diverged { at: f64 },

    #[error("window too short: {0}")]
    WindowTooShort(String),

    #[error("not enough mean-crossings: found {found}, need at least {needed}")]
    TooFewCrossings { found: usize, needed: usize },

    #[error(
        "metric difference does not change sign over [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
    )]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, ChatterError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(ChatterError::Domain(msg.into()))
}
