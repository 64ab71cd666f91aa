use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph: line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("incomplete: {0} timed out before a certified answer was found")]
    Incomplete(&'static str),

    #[error("length mismatch: {what} has length {actual}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("set is not independent: {a} and {b} are confusable at node {node}")]
    NotIndependent { a: String, b: String, node: usize },

    #[error("improper coloring: adjacent vertices {a} and {b} share color {color}")]
    ImproperColoring { a: String, b: String, color: usize },

    #[error("no admissible scaling r in the requested range")]
    NoAdmissibleScale,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn cap(what: &'static str, limit: u64, actual: u64) -> Self {
        Error::CapExceeded {
            what,
            limit,
            actual,
        }
    }
}
