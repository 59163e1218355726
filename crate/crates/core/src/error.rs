use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("evaluation point is zero")]
    ZeroPoint,
    #[error("{q0} is not a unit modulo {modulus}")]
    NonUnit { q0: u64, modulus: u64 },
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("coefficient too large for divisor enumeration: {0}")]
    CoefficientTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("bad braid word syntax: {0}")]
    BadSyntax(String),
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("a braid needs at least two strands, got {0}")]
    TooFewStrands(usize),
    #[error("free group image exceeded {0} letters")]
    Overflow(usize),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForkError {
    #[error("invalid fork spec: {0}")]
    BadSpec(String),
    #[error("no integer number of lower arcs fits the spec")]
    ParityViolation,
    #[error("tine edge is disconnected: traversal visited {visited} of {k} crossings")]
    Disconnected { visited: usize, k: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid scan parameters: {0}")]
    BadParams(String),
    #[error("invalid specialization point: {0}")]
    BadPoint(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint was written for different parameters (hash {found}, expected {expected})")]
    ParamsMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fork(#[from] ForkError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("full twist needs 2 <= m <= n, got m={m}, n={n}")]
    BadRange { m: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no standard arc reached within {budget} plateau moves (stuck at complexity {complexity})")]
    Unreachable { budget: usize, complexity: usize },
    #[error("no twist exponent gives the required Burau identity")]
    VerificationFailed,
    #[error(transparent)]
    Fork(#[from] ForkError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}
