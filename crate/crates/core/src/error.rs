use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular: no nonzero pivot in column {column}")]
    Singular { column: usize },
    #[error("invalid rational literal {0:?}")]
    RationalLiteral(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error(
        "precision exhausted at iteration {iteration} ({detail}); raise the bit budget with --mode exact-capped:<bits>"
    )]
    PrecisionExhausted { iteration: u64, detail: String },
    #[error("resource budget exceeded at iteration {iteration}: {detail}")]
    BudgetExceeded { iteration: u64, detail: String },
    #[error("{0}")]
    OutOfRange(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
