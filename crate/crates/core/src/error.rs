use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid domain at {path}: {reason}")]
    InvalidDomain { path: String, reason: String },

    #[error("point {point:?} is not in the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("point {point:?} is too close to the boundary (distance {distance:e})")]
    TooCloseToBoundary { point: Vec<f64>, distance: f64 },

    #[error("weight undefined/infinite at {point:?}: every sampled direction misses the complement")]
    InfiniteWeight { point: Vec<f64> },

    #[error("operation requires a convex domain")]
    NotConvex,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no weight value at node {node} ({point:?})")]
    MissingWeight { node: usize, point: Vec<f64> },

    #[error("missing potential value at node {node}")]
    MissingPotential { node: usize },

    #[error("zero denominator: the function has vanishing norm")]
    ZeroNorm,

    #[error("form negative ({value:e}) - refine grid")]
    NegativeForm { value: f64 },

    #[error("nonpositive Hardy form ({value:e}) - refine grid or enlarge support margin")]
    NonpositiveForm { value: f64 },

    #[error("non-finite quotient at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("factorization breakdown on {unknowns} unknowns: {reason}")]
    FactorizationBreakdown { unknowns: usize, reason: String },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("search failure: every restart hit a nonpositive form")]
    SearchFailed,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
