use thiserror::Error;

/// Errors produced by model validation, numerical kernels and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series truncation: {required} terms needed, cap is {cap}")]
    Truncation { required: usize, cap: usize },

    #[error("singular matrix: zero pivot at column {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("ill-conditioned system: condition estimate {estimate:.3e}")]
    IllConditioned { estimate: f64 },

    #[error("rank-deficient least squares: {0}")]
    RankDeficient(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
