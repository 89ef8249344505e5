//! Crate-wide error type.
//!
//! Every validation failure names the violated invariant and carries the
//! measured residual, so callers can report actionable diagnostics.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dag| = {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("trace is {trace:.17}: |trace - 1| = {residual:.3e} exceeds {tol:.3e}")]
    TraceNotOne { trace: f64, residual: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} is below -{tol:.3e}")]
    NotPositive { eigenvalue: f64, tol: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| = {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("eigensolver did not converge within {max_iter} iterations")]
    ConvergenceFailure { max_iter: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("alpha = {alpha} is outside the domain (0,1) union (1,inf)")]
    AlphaOutOfDomain { alpha: f64 },

    #[error("invalid spectrum: {detail}")]
    InvalidSpectrum { detail: String },

    #[error("invalid outcome distribution: {detail}")]
    InvalidDistribution { detail: String },

    #[error("invalid POVM: {detail}")]
    InvalidPovm { detail: String },

    #[error("outcome sets differ: {detail}")]
    OutcomeMismatch { detail: String },

    #[error("POVM normalizer is singular: smallest eigenvalue {min_eigenvalue:.3e}")]
    SingularNormalizer { min_eigenvalue: f64 },

    #[error("degenerate variance: Var_Q[g] = 0 while the means under P and Q differ by {mean_gap:.3e}")]
    DegenerateVariance { mean_gap: f64 },

    #[error("precondition violated: {detail}")]
    PreconditionViolated { detail: String },

    #[error("invalid configuration: {detail}")]
    InvalidConfig { detail: String },

    #[error("estimator pinned at a grid boundary in {fraction:.4} of shots (limit 0.01); widen the grid")]
    GridTooCoarse { fraction: f64 },

    #[error("all grid points have zero likelihood for the observed outcomes")]
    AllZeroLikelihood,
}

pub type Result<T> = std::result::Result<T, Error>;
