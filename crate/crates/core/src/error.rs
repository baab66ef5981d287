//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("color {color} out of range for a signature with {s} generators")]
    ColorOutOfRange { color: usize, s: usize },

    #[error("the empty word has no word-graph")]
    EmptyWord,

    #[error("partition covers {partition} elements but the ground set has {expected}")]
    GroundSetMismatch { partition: usize, expected: usize },

    #[error("graph is not admissible")]
    NotAdmissible,

    #[error("graph is not monocolored")]
    NotMonocolored,

    #[error("graph is not connected")]
    NotConnected,

    #[error("graph has {vertices} vertices, exceeding the enumeration bound {bound}")]
    VertexBoundExceeded { vertices: usize, bound: usize },

    #[error("partition is not a refinement of the coarser one")]
    NotARefinement,

    #[error("S_{n}^({set}) is empty")]
    EmptyPermutationSet { set: String, n: u64 },

    #[error("cycle length {k} does not belong to {set}")]
    CycleLengthNotInSet { k: u64, set: String },

    #[error("count table covers N <= {max} but N = {n} was requested")]
    TableTooSmall { n: u64, max: u64 },

    #[error("estimated work {estimate} exceeds the budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },

    #[error("invalid {what}: {text}")]
    Parse { what: &'static str, text: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, text: impl Into<String>) -> Self {
        Error::Parse {
            what,
            text: text.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
