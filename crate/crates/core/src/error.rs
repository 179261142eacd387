use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two states or an instance and a state disagree on dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The state breaks a puzzle rule, so the requested operation is undefined.
    #[error("rule violation: {0}")]
    RuleViolation(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("index {index} out of range for {len} expressions")]
    Index { index: usize, len: usize },

    #[error("nothing to revert")]
    EmptyHistory,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("cannot resolve clue: {0}")]
    Resolution(String),

    #[error("conflict at row {row}, column {col}: {message}")]
    Conflict {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("malformed state text: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
