use thiserror::Error;

#[derive(Debug, Error)]
pub enum CvError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("register of {requested} amplitudes exceeds the cap of {cap}")]
    MemoryCap { requested: u128, cap: usize },
    #[error("post-selection probability {probability:e} is below {threshold:e}")]
    DegeneratePostSelection { probability: f64, threshold: f64 },
    #[error("accumulated leakage {accumulated:e} exceeds the limit {limit:e} after {gates} gates")]
    LeakageExceeded { accumulated: f64, limit: f64, gates: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Core(#[from] sigma_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CvError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CvError {
    CvError::InvalidArgument(msg.into())
}
