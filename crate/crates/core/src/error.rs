use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),

    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),

    #[error("edge references undeclared vertex `{0}`")]
    UndeclaredVertex(String),

    #[error("unknown vertex `{label}` at position {pos}")]
    UnknownVertex { label: String, pos: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("exponent must be a positive integer at position {pos}")]
    BadExponent { pos: usize },

    #[error("vertex set {0} is not a clique")]
    NotAClique(String),

    #[error("missing generator for vertex `{0}`")]
    MissingGenerator(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("generator `{vertex}` has norm {norm:.6e}, exceeding 1 + tol")]
    NotContractive { vertex: String, norm: f64 },

    #[error("generators `{a}` and `{b}` are adjacent but do not commute (residual {residual:.3e})")]
    NotCommuting { a: String, b: String, residual: f64 },

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.6e})")]
    NotPsd(f64),

    #[error("subset sweep over {vertices} vertices exceeds guard {guard}")]
    GuardExceeded { vertices: usize, guard: usize },

    #[error("no word in the set has two or more blocks")]
    NoMultiBlockWord,

    #[error("graph is not complete")]
    NotComplete,

    #[error("invalid projection family: {0}")]
    InvalidProjections(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
