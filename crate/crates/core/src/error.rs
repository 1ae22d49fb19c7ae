use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix data has {found} entries, expected {rows}x{cols}")]
    BadShape {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("entry ({row}, {col}) = {value} is outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("column {0} of the design matrix is identically zero")]
    ZeroColumn(usize),

    #[error("point is not strictly inside the simplex (coordinate {0})")]
    NotInterior(usize),

    #[error("point does not lie on the simplex")]
    NotOnSimplex,

    #[error("negative step size {0}")]
    NegativeStep(f64),

    #[error("step-size sum is zero, bound is undefined")]
    ZeroStepSum,

    #[error("schedule `{schedule}` requires parameter `{parameter}`")]
    MissingParameter {
        schedule: &'static str,
        parameter: &'static str,
    },

    #[error("invalid parameter `{name}`: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{prox} prox function is not supported on the {domain} domain")]
    IncompatibleProx {
        prox: &'static str,
        domain: &'static str,
    },

    #[error("unbounded domain: the Bregman diameter must be supplied through a reference optimum")]
    UnboundedDomain,

    #[error("step-size schedule exhausted after {0} steps")]
    ScheduleExhausted(usize),

    #[error("iteration count must be at least 1")]
    NoIterations,
}
