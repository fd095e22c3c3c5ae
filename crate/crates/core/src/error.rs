use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlsError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    /// The prover was asked for certificates on an instance outside the language.
    #[error("predicate does not hold: {0}")]
    NotInLanguage(String),
    /// A parameter is outside the range in which the construction is defined.
    #[error("refused: {0}")]
    Refused(String),
    /// An enumeration would exceed its configured budget.
    #[error("budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("unknown scheme: {0}")]
    UnknownScheme(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for PlsError {
    fn from(e: std::io::Error) -> Self {
        PlsError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PlsError {
    fn from(e: serde_json::Error) -> Self {
        PlsError::Malformed(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PlsError>;
