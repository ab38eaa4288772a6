use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 3 for a nonparabolic manifold, got {0}")]
    Dimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nonmonotone volume: {0}")]
    NonmonotoneVolume(String),

    #[error("manifold is parabolic: {0}")]
    Parabolic(String),

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("below threshold; use small-time branch (s = {s}, theta(R0) = {threshold})")]
    BelowThreshold { s: f64, threshold: f64 },

    #[error("root bracket could not be established: {0}")]
    Bracket(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("missing snapshots: {0}")]
    MissingSnapshots(String),

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
