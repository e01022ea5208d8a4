use thiserror::Error;

use crate::funcparse::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("index {index} exceeds maximum depth {max_depth}")]
    DepthExceeded { index: usize, max_depth: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("cannot sample domain: {0}")]
    Unsampleable(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "infeasible expansion step {step}: no rational with denominator <= {denominator_bound} in [{lower}, {upper}]"
    )]
    InfeasibleStep {
        step: usize,
        lower: f64,
        upper: f64,
        denominator_bound: u64,
    },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
