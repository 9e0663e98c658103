use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 1..=3 for {what}")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("field arity mismatch: expected {expected} components, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{integral} diverges: {detail}")]
    Divergent { integral: &'static str, detail: String },

    #[error("angular truncation: relative energy {residual:.3e} above l_max = {l_max} exceeds {tolerance:.1e}")]
    Truncation { l_max: usize, residual: f64, tolerance: f64 },

    #[error("grid cannot resolve delta = {delta}: r_min = {r_min:.3e}, need r_min <= {required:.3e}")]
    Unresolved { delta: f64, r_min: f64, required: f64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),

    #[error("line {line}, field `{field}`: {message}")]
    Schema { line: usize, field: String, message: String },

    #[error("serialization: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Format(e.to_string())
    }
}
