use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("group order {order} exceeds the configured cap {cap}")]
    CapExceeded { order: usize, cap: usize },

    #[error("operands belong to different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("the period of the empty set is undefined")]
    UndefinedPeriod,

    #[error("empty set where a nonempty one is required")]
    EmptySet,

    #[error("set does not generate the group")]
    NotGenerating,

    #[error("connectivity of order {k} is undefined for a group of order {order} (need |G| >= 2k-1)")]
    UndefinedConnectivity { order: usize, k: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not a prime")]
    NotPrime(usize),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("internal invariant broken: {0}")]
    InternalInvariant(String),

    /// A search that a theorem guarantees to succeed came back empty.
    #[error("theorem falsified: {0}")]
    TheoremFalsified(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
