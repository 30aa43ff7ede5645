use thiserror::Error;

/// Errors raised while building fields and codebooks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("characteristic must be an odd prime, got {0}")]
    EvenCharacteristic(u64),

    #[error("extension degree must be positive")]
    ZeroDegree,

    #[error("parameter arithmetic overflowed: {0}")]
    Overflow(String),

    #[error("enumeration budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("element {value} is not in a field of order {order}")]
    InvalidElement { value: u32, order: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("multiplicative characters are undefined at zero")]
    ZeroArgument,

    #[error("fields are not nested: {0}")]
    NotNested(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computed quantity contradicted a proven identity. Always a bug in
    /// field construction or enumeration, never a user error.
    #[error("integrity failure: {0}")]
    Integrity(String),

    #[error("malformed codebook file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by the caller's parameters rather than by a
    /// failed computation or I/O.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::NotPrime(_)
                | Error::EvenCharacteristic(_)
                | Error::ZeroDegree
                | Error::Overflow(_)
                | Error::BudgetExceeded { .. }
                | Error::InvalidElement { .. }
                | Error::Precondition(_)
                | Error::NotNested(_)
        )
    }
}
