use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The variants split into two families that the command-line front end maps
/// to different exit codes: *validation* errors (bad arguments or violated
/// preconditions) and *numeric* failures (singular blocks, truncation leakage,
/// non-convergent sums).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular conditioning block on quadrature indices {indices:?}")]
    SingularConditioning { indices: Vec<usize> },

    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    #[error("truncation leakage {leakage:.3e} exceeds {limit:.1e}")]
    TruncationLeakage { leakage: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("accuracy requirement not met: {0}")]
    Accuracy(String),

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::PreconditionViolation(_)
                | Error::DimensionMismatch(_)
                | Error::DegeneratePair(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
