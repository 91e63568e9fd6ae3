use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("singular gap: |x| = {0:e} is inside the zero-gap band")]
    SingularGap(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("regime {0} has no baseline policy")]
    UnsupportedRegime(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
