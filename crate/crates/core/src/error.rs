use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum FanoError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid Fano type: {0}")]
    InvalidType(String),

    #[error("expected dimension is {0}, not zero")]
    NotAFanoProblem(i128),

    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tangent vector must be nonzero")]
    ZeroTangent,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("certification failure: {0}")]
    Certification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FanoError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(FanoError::Dimension { expected, found })
    }
}
