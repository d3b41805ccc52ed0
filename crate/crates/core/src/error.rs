use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("ambient dimension {got} exceeds capacity {max}")]
    Capacity { got: usize, max: usize },

    #[error("matrix is not Hermitian: relative deviation {dev:.3e} exceeds {tol:.3e}")]
    NotHermitian { dev: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}, trace {trace:.3e}")]
    NotPsd { min_eig: f64, trace: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown state constructor `{0}`")]
    UnknownConstructor(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimMismatch(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
