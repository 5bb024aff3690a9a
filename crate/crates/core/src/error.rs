use thiserror::Error;

/// Errors raised by the attribution library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttribError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("monomial over {subset:?} repeats a variable")]
    RepeatedVariable { subset: Vec<usize> },

    #[error("variable {index} does not appear in monomial {subset:?}")]
    NotInMonomial { index: usize, subset: Vec<usize> },

    #[error("enumeration over {n}! orders exceeds the cap of n <= {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("method `{0}` requires a multilinear plus separable function")]
    Unsupported(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("cycle detected in graph through node `{0}`")]
    Cycle(String),

    #[error("path count exceeds cap of {0}")]
    PathCap(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),

    #[error("{0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, AttribError>;

impl From<std::io::Error> for AttribError {
    fn from(e: std::io::Error) -> Self {
        AttribError::Io(e.to_string())
    }
}
