use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("operation requires a tabulated instance")]
    NotTabulated,

    #[error("negative marginal gain {gain} for element {element} (input is not monotone)")]
    NegativeMarginal { element: usize, gain: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown distribution {0:?}")]
    UnknownDistribution(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::TooLarge(_) => "too_large",
            Error::NotTabulated => "not_tabulated",
            Error::NegativeMarginal { .. } => "negative_marginal",
            Error::Infeasible(_) => "infeasible",
            Error::NoConvergence(_) => "no_convergence",
            Error::Parse { .. } => "parse",
            Error::UnknownDistribution(_) => "unknown_distribution",
            Error::CheckFailed(_) => "check_failed",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
