//! Monte-Carlo verification harness.
//!
//! Each campaign samples random dynamics, measures a physical quantity on
//! the evolved state, compares it against the spectral bound, and emits one
//! record per comparison. Records carry a signed margin so that summaries
//! can rank near-violations without re-deriving bound direction.

pub mod estimation;
pub mod tightness;
pub mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace_env, tensor_product, validate_density, DensityMatrix, UnitaryMatrix};
use crate::report::ExtReal;
use crate::tolerance::{ToleranceSet, VIOLATION_TOL};

pub use estimation::{
    default_grid, mle_grid_estimator, run_estimation, swap_generator, EstimationConfig,
    EstimationReport,
};
pub use tightness::{gell_mann_basis, probe_tightness, ProbeConfig, ProbeOutcome};
pub use verify::{
    verify_divergence_bound, verify_majorization, verify_tur, MajorizationSummary, StateSource,
    VerifyConfig,
};

/// Reduced output state Tr_E[U (rho_S (x) rho_E) U^dag].
pub fn evolve(
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    u: &UnitaryMatrix,
    tol: &ToleranceSet,
) -> Result<DensityMatrix> {
    let d_s = rho_s.dim();
    let d_e = rho_e.dim();
    if u.dim() != d_s * d_e {
        return Err(Error::DimensionMismatch {
            expected: d_s * d_e,
            actual: u.dim(),
        });
    }
    let joint = tensor_product(rho_s.matrix(), rho_e.matrix());
    let reduced = partial_trace_env(&u.conjugate(&joint), d_s, d_e)?;
    validate_density(&reduced, tol)
}

/// Which quantity a record compares against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PetzRenyi,
    SandwichedRenyi,
    BuresAngle,
    TurRatio,
    Chain,
}

/// One measured-versus-bound comparison.
///
/// `margin` is signed so that nonnegative always means satisfied: for upper
/// bounds it is bound - measured, for lower bounds measured - bound. A trial
/// index of -1 marks the deterministic extremal-unitary row appended after
/// the sampled trials.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: i64,
    pub quantity: Quantity,
    pub alpha: Option<f64>,
    pub measured: ExtReal,
    pub bound: ExtReal,
    pub margin: ExtReal,
    pub vacuous: bool,
    pub violation: bool,
}

pub(crate) fn margin_upper(measured: f64, bound: f64) -> f64 {
    // An infinite upper bound is satisfied by anything; an infinite measured
    // value under a finite bound is a hard violation. Special-cased to keep
    // inf - inf from producing NaN.
    if bound == f64::INFINITY {
        f64::INFINITY
    } else if measured == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        bound - measured
    }
}

fn margin_lower(measured: f64, bound: f64) -> f64 {
    if measured == f64::INFINITY {
        f64::INFINITY
    } else if bound == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        measured - bound
    }
}

impl TrialRecord {
    /// Record for a quantity bounded from above (measured <= bound).
    pub fn upper(
        trial: i64,
        quantity: Quantity,
        alpha: Option<f64>,
        measured: f64,
        bound: f64,
        vacuous: bool,
    ) -> Self {
        let margin = margin_upper(measured, bound);
        Self {
            trial,
            quantity,
            alpha,
            measured: ExtReal(measured),
            bound: ExtReal(bound),
            margin: ExtReal(margin),
            vacuous,
            violation: !vacuous && margin < -VIOLATION_TOL,
        }
    }

    /// Record for a quantity bounded from below (measured >= bound).
    pub fn lower(
        trial: i64,
        quantity: Quantity,
        alpha: Option<f64>,
        measured: f64,
        bound: f64,
        vacuous: bool,
    ) -> Self {
        let margin = margin_lower(measured, bound);
        Self {
            trial,
            quantity,
            alpha,
            measured: ExtReal(measured),
            bound: ExtReal(bound),
            margin: ExtReal(margin),
            vacuous,
            violation: !vacuous && margin < -VIOLATION_TOL,
        }
    }
}

/// Aggregate view of a campaign's records.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub trials: u64,
    pub records: u64,
    pub violations: u64,
    pub vacuous: u64,
    /// Smallest margin over non-vacuous records; +inf when every record was
    /// vacuous or the campaign produced none.
    pub worst_margin: ExtReal,
}

impl CampaignSummary {
    pub fn from_records(trials: u64, records: &[TrialRecord]) -> Self {
        let mut worst = f64::INFINITY;
        let mut violations = 0;
        let mut vacuous = 0;
        for r in records {
            if r.vacuous {
                vacuous += 1;
                continue;
            }
            if r.violation {
                violations += 1;
            }
            if r.margin.0 < worst {
                worst = r.margin.0;
            }
        }
        Self {
            trials,
            records: records.len() as u64,
            violations,
            vacuous,
            worst_margin: ExtReal(worst),
        }
    }
}
