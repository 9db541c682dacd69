use chatter_core::ChatterError;
use thiserror::Error;

pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_STABILITY: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ChatterError),
    #[error("{0}")]
    Io(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(ChatterError::Domain(_)) => EXIT_USAGE,
            CliError::Core(ChatterError::StabilityViolation { .. }) => EXIT_STABILITY,
            CliError::Core(ChatterError::Diverged { .. }) => EXIT_DIVERGED,
            CliError::Core(_) | CliError::Io(_) | CliError::NotConverged(_) => EXIT_SOLVER,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
