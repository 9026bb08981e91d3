use thiserror::Error;

/// Errors raised by the numerical kernel and the analysis modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds tolerance {tol:.3e})")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("matrix is not antisymmetric (defect {defect:.3e})")]
    NotAntisymmetric { defect: f64 },
    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("density matrix invariant violated: {0}")]
    InvariantViolation(String),
    #[error("product vector is not in the required range (residual {residual:.3e})")]
    NotInRange { residual: f64 },
    #[error("state is not PPT (minimum eigenvalue of the partial transpose {min_eigenvalue:.3e})")]
    NotPpt { min_eigenvalue: f64 },
    #[error("dimensions {m}x{n} are outside the supported range for this operation")]
    DimensionOutOfScope { m: usize, n: usize },
    #[error("total dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("polynomial system is numerically ill-conditioned (residual {residual:.3e})")]
    NumericallyIllConditioned { residual: f64 },
    #[error("state is not an edge state: {0}")]
    EdgePreconditionFailed(String),
    #[error("witness does not detect the target (tr(W rho) = {value:.3e})")]
    NonDetecting { value: f64 },
    #[error("input pure state is a product state")]
    ProductStateInput,
    #[error("frame fails to span the operator space")]
    SingularFrame,
    #[error("operation requires {expected} single-particle modes, got {got}")]
    WrongModeCount { expected: usize, got: usize },
    #[error("not a valid state: {0}")]
    NotAState(String),
    #[error("unknown state family `{0}`")]
    UnknownFamily(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
