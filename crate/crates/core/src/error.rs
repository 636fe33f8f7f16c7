use thiserror::Error;

/// Errors raised by bitstring arithmetic, the ciphers, the oracles and the
/// analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected} bits, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("key material does not match scheme {scheme}: {reason}")]
    InvalidKey { scheme: &'static str, reason: String },

    #[error(
        "key space of 2^{bits} keys exceeds the enumeration cap of 2^{cap_bits} \
         (an exhaustive search would evaluate {estimate} keys)"
    )]
    KeySpaceTooLarge { bits: u32, cap_bits: u32, estimate: u128 },

    #[error("exhaustive enumeration over 2^{bits} values exceeds the cap of 2^{cap_bits}")]
    EnumerationTooLarge { bits: usize, cap_bits: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dimension(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            actual,
        }
    }
}
