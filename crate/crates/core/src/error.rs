use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionOverflow { dim: u128, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e}, {converged} of {requested} pairs locked)")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        converged: usize,
        requested: usize,
    },

    #[error("quadrature did not reach tolerance: estimated error {error:.3e} after {evaluations} evaluations")]
    Quadrature { error: f64, evaluations: usize },

    #[error("{count} non-finite integrand samples encountered")]
    NonFinite { count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
