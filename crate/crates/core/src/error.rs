use thiserror::Error;

/// Errors raised by the engine. Inconclusive searches are not errors; they
/// are reported through [`crate::certifier::Status`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("digit {digit} at level {level} is outside 0..{radix}")]
    InvalidDigit { level: usize, digit: u64, radix: u64 },

    #[error("sum reaches or exceeds 1")]
    OverflowBeyondUnit,

    #[error("operands use different radix systems")]
    SystemMismatch,

    #[error("malformed interval: lower end {lo} exceeds upper end {hi}")]
    MalformedInterval { lo: String, hi: String },

    #[error("interval count {count} exceeds the cap of {cap}")]
    CapacityExceeded { count: usize, cap: usize },

    #[error("union family has no valid collapse rule")]
    UnprojectableFamily,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("increment tree too shallow: {0}")]
    InsufficientDepth(String),

    #[error("no admissible digit at level {level}")]
    NoAdmissibleDigit { level: usize },

    #[error("candidate is not a fixed point of the difference IFS")]
    NotAFixedPoint,

    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("radix at level {level} does not fit in 64 bits")]
    RadixOverflow { level: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
