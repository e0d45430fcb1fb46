use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for {nvars} variables")]
    VariableIndex { index: usize, nvars: usize },
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported range: {0}")]
    UnsupportedRange(String),
    #[error("singular family member: {0}")]
    SingularFamily(String),
    #[error("no smooth member found after {0} attempts")]
    RetryBudget(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
