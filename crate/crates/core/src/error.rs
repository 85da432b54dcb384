use thiserror::Error;

/// Errors raised by state construction, measures and channels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| entry = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPsd { eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not pure (estimated rank {rank})")]
    NotPure { rank: usize },

    #[error("correlation vector outside the tetrahedron: negative eigenvalues {negative:?}")]
    OutsideTetrahedron { negative: Vec<((u8, u8), f64)> },

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("incomplete projective measurement: {0}")]
    IncompleteMeasurement(String),

    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
