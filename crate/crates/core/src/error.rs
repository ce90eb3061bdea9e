use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("type `{0}` has no available quantifier")]
    NoAvailableQuantifier(String),

    #[error("type `{0}` is not resolved")]
    Unresolved(String),

    #[error("undefined transition: {0}")]
    UndefinedTransition(String),

    #[error("malformed dialogue: {0}")]
    MalformedDialogue(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("type error at `{term}`: {msg}")]
    Type { term: String, msg: String },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("term is not in eta-long beta-normal form: {0}")]
    NotEtaLong(String),

    #[error("strategy is not {property}; witness play:\n{witness}")]
    Strategy { property: String, witness: String },

    #[error("black box `{0}` was never imported by the opponent")]
    UnknownBlackBox(String),

    #[error("interaction exceeded its budget of {budget} steps")]
    BudgetExceeded { budget: usize, transcript: String },

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }
}
