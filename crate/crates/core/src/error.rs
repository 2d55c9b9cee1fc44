use crate::scalars::Ring;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),

    #[error("{value} is not a unit in {ring}")]
    NotAUnit { value: String, ring: Ring },

    #[error("{0} is not a prime not exceeding 2^31")]
    NotPrime(u64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{operation} is not supported over {ring}")]
    UnsupportedRing { ring: Ring, operation: &'static str },

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("expected a {expected} algebra, found {found}")]
    KindMismatch { expected: &'static str, found: &'static str },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("search exhausted after {0} tries")]
    SearchExhausted(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}

pub(crate) fn ensure_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dims(expected, found))
    }
}
