use thiserror::Error;

/// Errors produced anywhere in the laboratory.
///
/// Variants split into *validation* failures (bad input, violated
/// precondition or configuration constraint) and *runtime* failures
/// (numerics that did not converge, I/O). The CLI maps the two classes to
/// different exit codes via [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid under-resolved: dx = {dx} exceeds L/64 = {limit}")]
    UnderResolved { dx: f64, limit: f64 },

    #[error("no bound state at level {level}: eigenvalue {energy} is not below the lowest outer wall {wall}")]
    NoBoundState {
        level: usize,
        energy: f64,
        wall: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's input rather than by the run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::UnderResolved { .. }
                | Error::NoBoundState { .. }
                | Error::InvalidParameter { .. }
                | Error::Constraint(_)
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
