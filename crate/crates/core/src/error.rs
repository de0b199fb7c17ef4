use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: bad partition, out-of-range vertex, bad overlap, ...
    #[error("invalid input: {0}")]
    Validation(String),

    /// A configured enumeration bound would be exceeded.
    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    /// Exact integer arithmetic overflowed its representation.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("tensor shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A normal subgroup is not invariant under the required maps.
    #[error("invariance violated: {0}")]
    Invariance(String),

    /// Membership could not be decided under the selected strategy.
    #[error("indeterminate membership: {0}")]
    Indeterminate(String),

    #[error("graph is not a fibre of the fibration: {0}")]
    AbsentFibre(String),

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, got: usize, limit: usize) -> Self {
        Error::Capacity { what, got, limit }
    }
}
