use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not a configuration: {0}")]
    NotAConfiguration(String),

    #[error("integer overflow during {0}")]
    Overflow(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("fiber has more than {cap} elements")]
    FiberTooLarge { cap: usize },

    /// A configurable resource limit was hit. `lower_bound` carries the best
    /// certified partial result, when the computation has one.
    #[error("resource budget exceeded in {what} (limit {limit})")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        lower_bound: Option<u64>,
    },

    #[error("slice {0} is not an element of the fiber")]
    SliceNotInFiber(usize),

    #[error("slice {0} is zero or not an indispensable move of the base configuration")]
    SliceNotIndispensable(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("multisets do not lie in the same fiber: {0}")]
    NotSameFiber(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("construction inconsistent: {0}")]
    ConstructionInconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}
