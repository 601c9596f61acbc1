use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("product lands in degree {degree}, above the truncation cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("insufficient normal data: product in degree {degree} needs {what}")]
    InsufficientNormalData { degree: usize, what: String },
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
