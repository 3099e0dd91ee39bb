use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("kernel is not integrable: {0}")]
    NonIntegrable(String),

    #[error("solver diverged: {0}")]
    Divergence(String),

    #[error("positivity repair failed: {0}")]
    Positivity(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing tail data: {0}")]
    MissingTail(String),

    #[error("degenerate metadata: {0}")]
    Metadata(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("near-singular system: {0}")]
    NearSingular(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
