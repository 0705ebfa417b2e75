use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Input errors map to exit code 1 and internal assertion failures to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("length mismatch: masses has {masses}, phi has {phi}, u has {u} entries")]
    LengthMismatch { masses: usize, phi: usize, u: usize },
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("mass at point {index} must be strictly positive, got {value}")]
    NonPositiveMass { index: usize, value: f64 },
    #[error("phi({index}) = {target} is outside 0..{len}")]
    MapOutOfRange { index: usize, target: usize, len: usize },
    #[error("phi[{index}] = {literal} is not a point index")]
    InvalidIndex { index: usize, literal: String },
    #[error("weight u({index}) must be nonnegative, got {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("value at {what}[{index}] is not a finite number: {literal}")]
    NonFinite {
        what: &'static str,
        index: usize,
        literal: String,
    },
    #[error("order m must be at least 1")]
    ZeroOrder,
    #[error("order m = {0} exceeds the supported maximum of {max}", max = crate::classifier::MAX_ORDER)]
    OrderTooLarge(usize),
    #[error("J sequence has {have} levels, order {order} needs {need}")]
    InsufficientLevels { have: usize, need: usize, order: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("space has {n} points, matrix oracle cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("point {0} is out of range")]
    PointOutOfRange(usize),
    #[error("x = {0} lies outside [0, 1]")]
    OutsideInterval(f64),
    #[error("unknown example id {0:?}; expected one of a, b, c")]
    UnknownExample(String),
    #[error("exact arithmetic requested but {0}")]
    NotRational(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("eigensolver did not converge for {0}")]
    EigenNoConvergence(&'static str),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Assertion(_) | Error::EigenNoConvergence(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
