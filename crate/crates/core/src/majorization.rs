//! Majorization predicates and the Schur machinery behind the spectral
//! bounds: the pairing function whose monotonicity drives the main bound,
//! the von Neumann trace sandwich, and the Schur-Horn diagonal check.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, Spectrum};
use crate::tolerance::ToleranceSet;

/// Slack allowed on prefix-sum comparisons.
pub const MAJORIZATION_TOL: f64 = 1e-10;

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::AlphaOutOfDomain { alpha });
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn sorted_asc(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

fn padded(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out
}

/// Prefix-sum majorization on raw value slices. The shorter slice is
/// zero-padded, so callers with negative entries must pass equal lengths.
pub fn majorizes_raw(x: &[f64], y: &[f64], tol: f64) -> bool {
    let len = x.len().max(y.len());
    let xs = sorted_desc(&padded(x, len));
    let ys = sorted_desc(&padded(y, len));
    let mut px = 0.0;
    let mut py = 0.0;
    for k in 0..len {
        px += xs[k];
        py += ys[k];
        if px < py - tol {
            return false;
        }
    }
    (px - py).abs() <= tol
}

/// Whether x majorizes y as probability vectors.
pub fn majorizes(x: &Spectrum, y: &Spectrum) -> bool {
    majorizes_raw(x.values(), y.values(), MAJORIZATION_TOL)
}

/// Smallest prefix-sum slack `sum_k x_down - sum_k y_down`; nonnegative
/// exactly when x majorizes y ignoring the total-mass check.
pub fn majorization_slack(x: &[f64], y: &[f64]) -> f64 {
    let len = x.len().max(y.len());
    let xs = sorted_desc(&padded(x, len));
    let ys = sorted_desc(&padded(y, len));
    let mut px = 0.0;
    let mut py = 0.0;
    let mut slack = f64::INFINITY;
    for k in 0..len {
        px += xs[k];
        py += ys[k];
        slack = slack.min(px - py);
    }
    slack
}

/// f(x) = sum_n (a_n up)^alpha (x_n down)^(1-alpha), the anti-aligned
/// pairing. Zero conventions match the divergences: a term with a_n = 0
/// contributes 0, and for alpha > 1 a term with a_n > 0 against x_n = 0
/// makes the sum +inf.
pub fn pairing_sum(a: &[f64], x: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let len = a.len().max(x.len());
    let aa = sorted_asc(&padded(a, len));
    let xx = sorted_desc(&padded(x, len));
    let mut sum = 0.0;
    for (&av, &xv) in aa.iter().zip(xx.iter()) {
        if av <= 0.0 {
            continue;
        }
        if xv <= 0.0 {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sum += av.powf(alpha) * xv.powf(1.0 - alpha);
    }
    Ok(sum)
}

/// Pairing function on probability vectors.
pub fn pairing_function(a: &Spectrum, x: &Spectrum, alpha: f64) -> Result<f64> {
    pairing_sum(a.values(), x.values(), alpha)
}

/// (1/(alpha-1)) ln f, the divergence-shaped transform of the pairing sum.
/// IEEE semantics give +inf both for f = inf at alpha > 1 and for f = 0 at
/// alpha < 1.
pub(crate) fn log_pairing(f: f64, alpha: f64) -> f64 {
    f.ln() / (alpha - 1.0)
}

/// Checks the Eq. 15 direction: when x majorizes y, the divergence-shaped
/// pairing of x dominates that of y.
pub fn schur_direction_check(
    a: &Spectrum,
    x: &Spectrum,
    y: &Spectrum,
    alpha: f64,
) -> Result<bool> {
    if !majorizes(x, y) {
        return Err(Error::PreconditionViolated {
            detail: "x does not majorize y".into(),
        });
    }
    let gx = log_pairing(pairing_function(a, x, alpha)?, alpha);
    let gy = log_pairing(pairing_function(a, y, alpha)?, alpha);
    Ok(gx >= gy - MAJORIZATION_TOL)
}

/// Discrete Schur-Ostrowski product (x_n - x_m)(df/dx_n - df/dx_m) for the
/// pairing sum, with central finite-difference partials. Nonpositive for
/// alpha in (0,1) where f is Schur-concave, nonnegative for alpha > 1.
pub fn schur_ostrowski_product(
    a: &[f64],
    x: &[f64],
    n: usize,
    m: usize,
    alpha: f64,
    step: f64,
) -> Result<f64> {
    assert!(n < x.len() && m < x.len() && n != m, "coordinate pair out of range");
    let partial = |idx: usize| -> Result<f64> {
        let mut plus = x.to_vec();
        plus[idx] += step;
        let mut minus = x.to_vec();
        minus[idx] -= step;
        Ok((pairing_sum(a, &plus, alpha)? - pairing_sum(a, &minus, alpha)?) / (2.0 * step))
    };
    Ok((x[n] - x[m]) * (partial(n)? - partial(m)?))
}

/// Von Neumann trace sandwich for Hermitian PSD matrices: returns
/// (sum lam_up(A) lam_down(B), Tr[AB], sum lam_up(A) lam_up(B)).
pub fn von_neumann_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceSet,
) -> Result<(f64, f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let ea = hermitian_eig(a, tol)?;
    let eb = hermitian_eig(b, tol)?;
    for e in [&ea, &eb] {
        let min = *e.values().last().unwrap();
        if min < -tol.psd {
            return Err(Error::NotPositive {
                eigenvalue: min,
                tol: tol.psd,
            });
        }
    }
    let la = ea.values_ascending();
    let lb_desc = eb.values().to_vec();
    let lb_asc = eb.values_ascending();
    let lower: f64 = la.iter().zip(lb_desc.iter()).map(|(x, y)| x * y).sum();
    let upper: f64 = la.iter().zip(lb_asc.iter()).map(|(x, y)| x * y).sum();
    let mid = a.matmul(b).trace().re;
    Ok((lower, mid, upper))
}

/// Schur-Horn check: the eigenvalue vector of a Hermitian matrix majorizes
/// its diagonal. Both vectors share the trace, so no normalization is
/// applied; the comparison runs at 1e-9 to absorb eigensolver error.
pub fn schur_horn_check(m: &ComplexMatrix, tol: &ToleranceSet) -> Result<bool> {
    let eig = hermitian_eig(m, tol)?;
    let diag: Vec<f64> = (0..m.dim()).map(|i| m[(i, i)].re).collect();
    Ok(majorizes_raw(eig.values(), &diag, 1e-9))
}
