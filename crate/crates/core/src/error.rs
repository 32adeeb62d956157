//! Crate-wide error type.

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("missing data: {0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;
