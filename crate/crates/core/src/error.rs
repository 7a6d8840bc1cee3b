use thiserror::Error;

/// Errors raised by the numerical kernels and the audit pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("operator is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("cannot normalize a zero or non-finite vector")]
    ZeroVector,

    #[error("unsharpness parameter must lie in (0, 1], got {0}")]
    InvalidLambda(f64),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("measurement is not dichotomic ({0} effects)")]
    NotDichotomic(usize),

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    #[error("no joint observable exists: coexistence condition violated (lhs = {0})")]
    NotCoexistent(f64),

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("correlation {0} lies outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("invalid behavior table: {0}")]
    InvalidBehavior(String),

    #[error("optimizer did not converge from any start (best value {0})")]
    OptimizerFailed(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
