use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix A·Aᵀ is rank deficient (pivot {pivot:e} below {threshold:e})")]
    RankDeficient { pivot: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("regularizer `{0}` is not differentiable; request a subgradient instead")]
    NotDifferentiable(&'static str),

    #[error("incompatible combination: {0}")]
    Incompatible(String),

    #[error("parse error: {0}")]
    Parse(String),
}
