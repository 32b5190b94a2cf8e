use thiserror::Error;

/// Errors raised by the engine. Infeasibility is never an error; it is a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid random variable `{name}`: {reason}")]
    InvalidVariable { name: String, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("constraint mismatch: {0}")]
    ConstraintMismatch(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("value out of range for {what}: {value}")]
    OutOfRange { what: String, value: String },

    #[error("atom lattice has {atoms} atoms, above the cap of {cap}; eliminate or merge variables before deciding")]
    AtomCapExceeded { atoms: String, cap: usize },

    #[error("certificate has {got} multipliers, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed function `{name}`: {reason}")]
    MalformedFunction { name: String, reason: String },

    #[error("not exactly representable: {0}")]
    NotRepresentable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
