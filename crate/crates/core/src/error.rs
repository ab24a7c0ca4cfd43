use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("slot {slot} is outside the cycle [0, {n})")]
    SlotOutOfRange { slot: usize, n: usize },

    #[error("a quorum must contain at least one slot")]
    EmptyQuorum,

    #[error("slot {0} appears more than once")]
    DuplicateSlot(usize),

    #[error("cycle length must be at least 1")]
    ZeroCycle,

    #[error("incompatible cycle lengths {left} and {right}; use the cross-system checker")]
    CycleMismatch { left: usize, right: usize },

    #[error("invalid access weights: {0}")]
    InvalidWeights(String),

    #[error("enumeration budget exceeded for {what}: needs {required}, cap is {limit}")]
    Budget {
        what: &'static str,
        required: u64,
        limit: u64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("closed form not valid here: {0}")]
    OutOfValidity(String),

    #[error("unsupported averaging convention: {0}")]
    UnsupportedConvention(String),

    #[error("active ratio is zero")]
    ZeroActiveRatio,

    #[error("invalid simulation config: {}", .0.join("; "))]
    Config(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameters(msg.into())
}
