use thiserror::Error;

/// Errors produced by the relay-channel toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A tall matrix whose second singular value falls under the rank tolerance.
    #[error("rank-deficient matrix: sigma2 = {sigma2:e}, sigma1 = {sigma1:e}")]
    RankDeficient { sigma1: f64, sigma2: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
