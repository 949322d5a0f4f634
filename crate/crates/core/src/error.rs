use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self loop at vertex {vertex} with nonzero weight")]
    SelfLoop { vertex: usize },

    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    #[error("vertex index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not binary at index {index}")]
    NonBinary { index: usize },

    #[error("point is infeasible: {0}")]
    InfeasiblePoint(String),

    #[error("feasible set is empty: {0}")]
    EmptySet(String),

    #[error("subproblem is infeasible (lower budget {lower}, upper budget {upper}, free {free})")]
    InfeasibleSubproblem { lower: i64, upper: i64, free: usize },

    #[error("problem too large for exhaustive enumeration: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },
}
