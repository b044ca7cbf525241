//! Error taxonomy shared by all modules.

use num_bigint::BigInt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Parameter outside the supported range (q < 2, k < 1, n < 2k, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Operation requires a prime field but q is not prime.
    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    /// Dense lattice computation would exceed the configured entry limit.
    #[error("size guard: operation needs {required} matrix entries, limit is {limit}")]
    SizeGuard { required: u128, limit: u128 },

    /// Arithmetic attempted between numbers living in different quadratic fields.
    #[error("radicand mismatch: {left} vs {right}")]
    RadicandMismatch { left: BigInt, right: BigInt },

    /// Exact division by zero.
    #[error("division by zero")]
    DivisionByZero,

    /// The multiplier search hit its floor without finding a feasible point.
    #[error("search exhausted: no feasible multiplier above {floor}")]
    SearchExhausted { floor: String },

    /// Malformed textual input (rational strings, serialized documents).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Machine-readable code used in CLI error documents and across the FFI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnsupportedField(_) => "unsupported_field",
            Error::SizeGuard { .. } => "size_guard",
            Error::RadicandMismatch { .. } => "radicand_mismatch",
            Error::DivisionByZero => "division_by_zero",
            Error::SearchExhausted { .. } => "search_exhausted",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
