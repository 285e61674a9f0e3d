use thiserror::Error;

use crate::hostack::StackError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("type syntax error: {0}")]
    TypeSyntax(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch {
        term: String,
        expected: String,
        found: String,
    },

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown non-terminal `{0}`")]
    UnknownNonTerminal(String),

    #[error("unfolded computation tree exceeds {0} nodes")]
    BudgetExceeded(usize),

    #[error("variable of order {order} cannot occur in an order-{scheme_order} scheme")]
    OrderOverflow { order: u32, scheme_order: u32 },

    #[error("scheme is not incrementally bound ({0} violations)")]
    NotIncrementallyBound(usize),

    #[error("transition relation is not a function: {0}")]
    NonFunctionDelta(String),

    #[error("machine error: {0}")]
    Machine(String),

    #[error(transparent)]
    Stack(#[from] StackError),
}
