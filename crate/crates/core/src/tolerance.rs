//! Numerical tolerances for validation and verification.

/// Absolute tolerances applied when validating operators and spectra.
///
/// All checks compare entrywise or scalar residuals against these values.
/// The defaults match the residuals expected from double-precision
/// eigendecompositions at the dimensions this crate targets (products up
/// to roughly 64).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSet {
    /// Max allowed entrywise deviation |M - M^dag|.
    pub hermiticity: f64,
    /// Max allowed |Tr M - 1|.
    pub trace: f64,
    /// Most negative eigenvalue admitted before a matrix is rejected.
    pub psd: f64,
    /// Max allowed entrywise deviation |U^dag U - I|.
    pub unitarity: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-10,
            psd: 1e-10,
            unitarity: 1e-10,
        }
    }
}

/// Eigenvalues at or below this value are treated as zero for support
/// (rank) decisions: support projections, negative matrix powers, and the
/// kernel checks inside the divergences.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Inequality slack used by verification campaigns: a trial counts as a
/// violation only when the measured value crosses its bound by more than
/// this amount.
pub const VIOLATION_TOL: f64 = 1e-9;
