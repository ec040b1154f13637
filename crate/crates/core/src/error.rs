use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("value kind mismatch: {0}")]
    KindMismatch(String),

    #[error("invalid metric table: {0}")]
    InvalidMetric(String),

    #[error("arity mismatch for {name}: expected {expected}, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("sort mismatch: {0}")]
    SortMismatch(String),

    #[error("quantifier guard violated: envelope {0} is not contained in the nonnegative reals")]
    QuantifierGuard(String),

    #[error("unassigned free variable `{0}`")]
    UnassignedVariable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("gluing hypothesis violated between points {0} and {1}")]
    GlueHypothesis(usize, usize),

    #[error("type is not finitely satisfiable at level {zeta}: no row approximates it on {points} points")]
    NotFinitelySatisfiable { zeta: f64, points: usize },

    #[error("no certified definition found: {0}")]
    Uncertified(String),

    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let pos = e
            .position()
            .map(|p| format!(" (line {})", p.line()))
            .unwrap_or_default();
        Error::Input(format!("{e}{pos}"))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(format!("{e}"))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Input(e.to_string())
    }
}
