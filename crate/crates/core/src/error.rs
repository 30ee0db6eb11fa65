use thiserror::Error;

/// Errors raised by the laboratory. Variants carry enough context to print a
/// useful message without the caller re-deriving anything.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("density is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("density trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("shape mismatch: expected blocks {expected:?}, found {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("operation needs a single matrix block, space has {blocks} blocks")]
    MultiBlockUnsupported { blocks: usize },
    #[error("direct-sum weights must be positive and sum to 1, got ({0}, {1})")]
    BadWeights(f64, f64),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("rank {rank} is impossible in a block of dimension {dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("point {re} + {im}i lies outside the strip 0 <= Im z <= 1")]
    OutsideStrip { re: f64, im: f64 },
    #[error("unsupported dimension {0}")]
    BadDimension(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("sort error: {0}")]
    SortError(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("log({lambda})/log({mu}) is rational ({p}/{q}); the state is not of type III_1")]
    RationalLogRatio { lambda: f64, mu: f64, p: i64, q: i64 },
    #[error("stage dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("eigenvalue list must be nonempty, positive and sum to 1: {0}")]
    BadEigs(String),
    #[error("scan step {step} is coarser than the allowed {max_step}")]
    ScanTooCoarse { step: f64, max_step: f64 },
    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),
    #[error("stage {stage} has operator norm {norm}, above the uniform bound {bound}")]
    BoundViolated { stage: usize, norm: f64, bound: f64 },
    #[error("probe `{0}` does not lie in the ideal")]
    ProbeNotInIdeal(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Format(String),
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

pub type Result<T> = std::result::Result<T, Error>;
