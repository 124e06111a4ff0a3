use thiserror::Error;

/// Errors raised across the library. Every variant maps to a stable `kind`
/// string so the CLI can report failures as JSON.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("perturbation theory breakdown: {0}")]
    Perturbative(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Infeasible(_) => "infeasible_parameters",
            Error::BasisMismatch(_) => "basis_mismatch",
            Error::Linalg(_) => "linalg",
            Error::Perturbative(_) => "perturbative",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
