use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A divisor or request names a curve or point the configuration does not have.
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The input violates a data invariant (parity, symmetry, negative definiteness, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("contraction refused: {0}")]
    ContractionRefused(String),
    #[error("pairing basis is insufficient: {0}")]
    BasisInsufficient(String),
    #[error("cone of curves contains a line: {0}")]
    ConeContainsLine(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    /// A proven statement failed on the computed data. Signals a bug or an
    /// inconsistent model rather than a user mistake.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// CLI exit status: 2 for input and operation errors, 3 for theorem contradictions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
