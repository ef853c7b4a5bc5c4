use thiserror::Error;

use crate::arena::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arena: {}", join(.0))]
    InvalidArena(Vec<Violation>),
    #[error("invalid payoff specification: {0}")]
    InvalidPayoff(String),
    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("unsupported payoff family: {0}")]
    Unsupported(String),
    #[error("discount factor {0} is outside (0, 1)")]
    DiscountOutOfRange(String),
    #[error("arena is not deterministic")]
    NotDeterministic,
    #[error("payoff range has fewer than two values; the game is trivial")]
    TrivialRange,
    #[error("weights must be nonnegative and one per player")]
    InvalidWeights,
    #[error("inconsistent components: {0}")]
    Inconsistent(String),
    #[error("enumeration bound exceeded: {0}")]
    BoundsExceeded(String),
    #[error("singular linear system")]
    Singular,
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
