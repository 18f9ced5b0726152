use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("out of range: {0}")]
    Range(String),

    #[error("{what} refuses {n} qubits (cap is {cap})")]
    Resource { what: &'static str, n: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("not Hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("order {order} formula needs exactly two commuting slices, got {slices}")]
    UnsupportedPartition { order: u8, slices: usize },

    #[error("the identity string has no exponentiation circuit")]
    IdentityString,

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
