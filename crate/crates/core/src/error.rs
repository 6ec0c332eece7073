use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is below the supported minimum {1}")]
    BadDimension(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("matrix is not trace-free: trace {trace:e} exceeds allowance {allowed:e}")]
    NotTraceFree { trace: f64, allowed: f64 },

    #[error("index k = {k} outside 1..={max}")]
    BadIndex { k: usize, max: usize },

    #[error("Jacobi eigensolver did not converge within {0} rotations")]
    NonConvergence(usize),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("profile is not positive at t = {0}")]
    BadProfile(f64),

    #[error("ODE step control could not reach tolerance {tol:e} (best residual {best:e})")]
    OdeStepFailure { tol: f64, best: f64 },

    #[error("chart is degenerate at sample {0}")]
    DegenerateChart(usize),

    #[error("finite-difference step too large: sample {sample} differs by {discrepancy:e} between h and h/2")]
    StepTooLarge { sample: usize, discrepancy: f64 },

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invariant violated at sample {sample}: {reason}")]
    InvariantViolation { sample: usize, reason: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
