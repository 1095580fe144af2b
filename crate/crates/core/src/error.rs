use thiserror::Error;

use crate::instance::Kind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Document(String),
    #[error("instance has no agents")]
    EmptyAgents,
    #[error("valuation row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("valuation at row {row}, column {col} is not an integer")]
    NonInteger { row: usize, col: usize },
    #[error(
        "valuations mix goods and chores: ({pos_row}, {pos_col}) is positive, ({neg_row}, {neg_col}) is negative"
    )]
    MixedSigns {
        pos_row: usize,
        pos_col: usize,
        neg_row: usize,
        neg_col: usize,
    },
    #[error("declared kind {declared:?} contradicts the sign of valuation ({row}, {col})")]
    KindMismatch {
        declared: Kind,
        row: usize,
        col: usize,
    },
    #[error("expected {expected} {what} names, found {found}")]
    NameCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown {what} name {name:?}")]
    UnknownName { what: &'static str, name: String },
    #[error("instance is not bivalued")]
    NotBivalued,
    #[error("agent {agent} has a zero valuation for item {item}")]
    ZeroValuation { agent: usize, item: usize },
    #[error("utility row is not factored")]
    NotFactored,
    #[error("utilities of agent {agent} are not weakly lexicographic")]
    NotWeaklyLexicographic { agent: usize },
    #[error(
        "agent {agent} has a non-integer ratio between its two values; MMS for non-factored personalized bivalued utilities is an open problem"
    )]
    NonIntegerRatio { agent: usize },
    #[error("row of agent {agent} is not ordered by non-increasing absolute value")]
    NotOrdered { agent: usize },
    #[error("{operation} does not support this instance: {reason}")]
    UnsupportedClass {
        operation: &'static str,
        reason: String,
    },
    #[error("{operation} requires a {expected:?} instance")]
    WrongKind {
        operation: &'static str,
        expected: Kind,
    },
    #[error("malformed allocation: {0}")]
    MalformedAllocation(String),
    #[error("price of item {item} is not strictly positive")]
    NonPositivePrice { item: usize },
    #[error("enumerating {n}^{m} assignments exceeds the budget of {budget}")]
    BudgetExceeded { n: usize, m: usize, budget: u64 },
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Whether this error signals a broken algorithm invariant rather than bad input.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }

    /// Whether this error means the instance lies outside the class a method supports.
    pub fn is_class_mismatch(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedClass { .. }
                | Error::WrongKind { .. }
                | Error::NotBivalued
                | Error::NotFactored
                | Error::NotWeaklyLexicographic { .. }
                | Error::NonIntegerRatio { .. }
                | Error::ZeroValuation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
