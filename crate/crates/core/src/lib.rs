//! Dynamics-independent limits on quantum state transformations.
//!
//! Given only the spectra of a system state and an environment state, this
//! crate computes upper bounds on how far any joint unitary can move the
//! system, measured by Renyi divergences, the Bures angle, and
//! thermodynamic-uncertainty-style ratios for measurements and estimators.
//! A Monte-Carlo harness samples Haar-random dynamics, POVMs, and
//! estimation experiments to check every bound empirically, and an
//! extremal construction exhibits the unitary that saturates them.

pub mod bounds;
pub mod divergence;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod majorization;
pub mod report;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::{ToleranceSet, SUPPORT_THRESHOLD, VIOLATION_TOL};
