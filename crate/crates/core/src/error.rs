use thiserror::Error;

use crate::types::{Position, Type};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    /// Ill-typed term. `rule` is set when the term belongs to a parsed rule.
    #[error("type error{} at position {position}: {message}", rule.map(|r| format!(" in rule {r}")).unwrap_or_default())]
    Type {
        rule: Option<usize>,
        position: Position,
        message: String,
    },

    #[error("cannot infer the type of `{name}` in rule {rule}")]
    InferenceAmbiguity { rule: usize, name: String },

    #[error("malformed left-hand side `{lhs}`: head must be a function symbol")]
    MalformedLhs { lhs: String },

    #[error("invalid position {0}")]
    InvalidPosition(Position),

    #[error("undeclared sort `{0}`")]
    UndeclaredSort(String),

    #[error("symbol `{name}` declared twice")]
    DuplicateSymbol { name: String },

    #[error("precedence is cyclic through `{0}`")]
    CyclicPrecedence(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("type mismatch: expected {want}, got {got}")]
    TypeMismatch { got: Type, want: Type },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("precedence search space exceeded: {symbols} symbols (limit {limit}); supply a precedence manually")]
    SearchSpaceExceeded { symbols: usize, limit: usize },
}

impl Error {
    pub fn type_error(position: Position, message: impl Into<String>) -> Error {
        Error::Type {
            rule: None,
            position,
            message: message.into(),
        }
    }

    /// True for errors caused by the input text or system, as opposed to
    /// search or exploration budgets.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::ResourceLimit(_) | Error::SearchSpaceExceeded { .. }
        )
    }
}
