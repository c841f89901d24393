use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} is outside the open interval (0, 1)")]
    Domain(f64),

    #[error("grid of {cells} cells exceeds the cell budget of {budget}")]
    BudgetExceeded { cells: u128, budget: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown field family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter for `{family}`: {reason}")]
    InvalidParameter { family: String, reason: String },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("function `{name}` takes {expected} argument(s), got {found} (offset {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },

    #[error("variable x{index} is out of range for a field of dimension {dim} (offset {offset})")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        offset: usize,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("field `{0}` is not smooth")]
    NonSmoothField(String),

    #[error("invalid intervals: {0}")]
    InvalidIntervals(String),

    #[error("Luxemburg bisection failed: {0}")]
    Bisection(String),

    #[error("invalid norm specification `{0}`")]
    InvalidNorm(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
