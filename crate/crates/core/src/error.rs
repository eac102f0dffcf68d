use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A propagator or grid configuration is unusable.
    #[error("configuration error: {0}")]
    Config(String),
    /// A quadrature or iteration failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Input data is malformed (non-finite amplitudes, shape mismatch).
    #[error("data error: {0}")]
    Data(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
