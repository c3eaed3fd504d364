use thiserror::Error;

/// Errors raised by constructors and analysis operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence is not strictly increasing at position {0}")]
    NotStrictlyIncreasing(usize),
    #[error("sequence too short: {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("duplicate point at position {index}")]
    DuplicatePoint { index: usize },
    #[error("descriptor violation: {0}")]
    DescriptorViolation(String),
    #[error("constant {name} = {value} must be >= {min}")]
    BadConstant {
        name: &'static str,
        value: f64,
        min: f64,
    },
    #[error("gap {0} must be > 1")]
    BadGap(f64),
    #[error("operation requires a {expected} descriptor")]
    WrongDescriptor { expected: &'static str },
    #[error("multiplicative set must not contain 0")]
    ZeroInSet,
    #[error("image list length {got} does not match window length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("quasisymmetry offset t = {0} must be positive")]
    NonpositiveOffset(f64),
    #[error("point lies on the real axis; evaluate the boundary map instead")]
    RealAxisInput,
    #[error("degenerate Jacobian at node {node}")]
    DegenerateJacobian { node: usize },
    #[error("radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})")]
    BadRadii { r_in: f64, r_out: f64 },
    #[error("continua touch: set distance is zero")]
    TouchingContinua,
    #[error("condenser masks overlap or are closer than two grid cells")]
    MasksTooClose,
    #[error("solver did not reach tolerance: residual {residual} after {iterations} iterations")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("sample does not cover the required neighborhood: {0}")]
    InsufficientCoverage(String),
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("unknown corpus set '{0}'")]
    UnknownCorpus(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("bad grid: {0}")]
    BadGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
