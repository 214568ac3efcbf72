use thiserror::Error;

/// Errors raised by curve evaluation, estimation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate quantile: denominator quantile is zero at p = {p}")]
    DegenerateQuantile { p: f64 },

    #[error("no sign change of the estimating equation on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("starting estimator failed: {0}")]
    StartFailure(Box<Error>),

    #[error("no interior minimum found in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown method '{0}'")]
    UnknownMethod(String),
}

impl Error {
    /// Short stable name of the error class, used in CLI diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::DegenerateQuantile { .. } => "DegenerateQuantile",
            Error::NoBracket { .. } => "NoBracket",
            Error::NonConvergence(_) => "NonConvergence",
            Error::StartFailure(_) => "StartFailure",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::UnknownMethod(_) => "UnknownMethod",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
