use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("gamma function pole at {0}")]
    Pole(f64),

    #[error("gamma function overflows for argument {0}")]
    Overflow(f64),

    #[error("Mellin-Barnes integrand does not decay along the contour: {0}")]
    NonDecaying(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("pole collision in residue series: {0}")]
    PoleCollision(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("{what} did not converge (error estimate {estimate:e})")]
    NonConvergence { what: String, estimate: f64 },

    #[error("series summation loses too many digits to cancellation: {0}")]
    Cancellation(String),

    #[error("data not negligible at grid boundary: {0}")]
    BoundaryDecay(String),

    #[error("tail fit failed: {0}")]
    TailFit(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Verification(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
