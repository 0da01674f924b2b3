use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("dimension {n} exceeds the enumeration ceiling {max}")]
    TooLarge { n: usize, max: usize },
    #[error("{what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("exact cover violated at cell {cell:?}: {reason}")]
    CoverViolation { cell: Vec<i64>, reason: String },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
