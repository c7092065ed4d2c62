use thiserror::Error;

/// Errors raised by the library. Mathematical verdicts (a bound that fails,
/// a study that does not converge) are reported in the returned reports,
/// not through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A hypothesis of one of the mean-value theorems does not hold for the
    /// supplied data.
    #[error("hypothesis violated ({hypothesis}): {detail}")]
    Hypothesis { hypothesis: &'static str, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("restriction is empty: no atom satisfies the membership predicate")]
    EmptyRestriction,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
