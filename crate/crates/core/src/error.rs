use thiserror::Error;

/// Errors raised by the geometric and dynamical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The musical matrix `B = Wᵀ + Σ λᵢλᵢᵀ` is singular or too badly conditioned to invert.
    #[error(
        "musical matrix is singular or ill-conditioned (cond_1 = {cond:.3e}, limit {limit:.3e})"
    )]
    SingularMusicalMatrix { cond: f64, limit: f64 },

    /// A deformation function is not invariant along some Reeb field.
    #[error(
        "R{index}(H') = {value:.3e} at a sample point; deformation requires Reeb-invariant H'"
    )]
    ReebInvarianceViolated { index: usize, value: f64 },

    #[error("adaptive step {step:.3e} underflowed at s = {at}")]
    StepSizeUnderflow { at: f64, step: f64 },

    #[error("non-finite state encountered at s = {at}")]
    NonFiniteState { at: f64 },

    /// Frequency dropped below the floor where action-angle variables are defined.
    #[error("omega(Q) = {omega:.3e} is below the floor {min:.3e}")]
    OmegaTooSmall { omega: f64, min: f64 },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
