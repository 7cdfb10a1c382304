use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("amplitude {index} is not a non-negative real")]
    NotNonnegative { index: usize },
    #[error("index set is empty")]
    EmptySet,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("sets are not nested; use trace_distance_pure on the realized vectors")]
    NotNested,
    #[error("outcome {0} has zero probability")]
    ZeroProbability(usize),
    #[error("family size {0} is odd")]
    OddFamily(usize),
    #[error("family sizes differ: {0} vs {1}")]
    FamilySizeMismatch(usize, usize),
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("graph is not regular: {0}")]
    NotRegular(String),
    #[error("sets overlap")]
    Overlapping,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operator is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("expander not certified: cheeger {0} < 2")]
    Uncertified(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
