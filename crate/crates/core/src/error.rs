use thiserror::Error;

/// Errors raised by the library. Every variant corresponds to a violated
/// precondition or a malformed input; numerical routines never fail silently.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("index {index} out of range ({expected})")]
    IndexOutOfRange { index: usize, expected: &'static str },

    #[error("non-finite number in input")]
    NonFinite,

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("rotation axes must be anticommuting Hermitian involutions")]
    InvalidAxes,

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("gate `{0}` has no published settings")]
    NoSettings(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("estimates require at least one shot")]
    ZeroShots,

    #[error("tomography runs do not match the five reference pairs: {0}")]
    WrongPairSet(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
