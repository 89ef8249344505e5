//! Saturation probe: maximizes the measured divergence over joint unitaries
//! to show how close sampled dynamics can get to the spectral bound.
//!
//! The search runs in a product chart U = U0 exp(-i H(p)) around Haar draws
//! U0, with H expanded in a Hermitian operator basis. Plain coordinate
//! descent with step halving is enough here because the objective is smooth
//! in the chart and restarts cover the global structure.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::divergence_bound;
use crate::divergence::petz_renyi;
use crate::error::{Error, Result};
use crate::harness::{evolve, margin_upper};
use crate::linalg::{
    c64, haar_unitary_from, unitary_exp, ComplexMatrix, DensityMatrix, RngSeed, UnitaryMatrix,
};
use crate::tolerance::ToleranceSet;

const IMPROVE_TOL: f64 = 1e-12;

/// Search configuration for one bound-saturation probe.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub rho_s: DensityMatrix,
    pub rho_e: DensityMatrix,
    pub alpha: f64,
    pub restarts: u32,
    /// Maximum search-phase evaluations per restart; the evaluation of each
    /// restart's initial Haar draw is not counted, so a budget of zero
    /// reduces the probe to the best of the initial draws.
    pub budget: u64,
    pub initial_step: f64,
    pub min_step: f64,
    pub seed: RngSeed,
}

impl ProbeConfig {
    pub fn new(rho_s: DensityMatrix, rho_e: DensityMatrix, alpha: f64, seed: RngSeed) -> Self {
        Self {
            rho_s,
            rho_e,
            alpha,
            restarts: 8,
            budget: 50_000,
            initial_step: 0.5,
            min_step: 1e-4,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        crate::divergence::check_alpha(self.alpha)?;
        if self.restarts == 0 || self.initial_step <= 0.0 || self.min_step <= 0.0 {
            return Err(Error::InvalidConfig {
                detail: "probe needs at least one restart and positive step sizes".into(),
            });
        }
        if self.min_step > self.initial_step {
            return Err(Error::InvalidConfig {
                detail: "minimum step exceeds the initial step".into(),
            });
        }
        Ok(())
    }
}

/// Result of a probe run.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeOutcome {
    pub best_value: f64,
    pub bound: f64,
    /// bound - best_value; small nonnegative values certify tightness.
    pub gap: f64,
    /// Chart parameters of the best point, relative to its restart's U0.
    pub params: Vec<f64>,
    /// Search-phase evaluations across all restarts.
    pub evaluations: u64,
    pub budget_exhausted: bool,
    pub restart_of_best: u32,
}

/// Hermitian operator basis for d x d matrices: identity, the symmetric and
/// antisymmetric off-diagonal pairs, and the diagonal traceless generators.
/// Exactly d^2 elements spanning all Hermitian matrices.
pub fn gell_mann_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    basis.push(ComplexMatrix::identity(d));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = c64(1.0, 0.0);
            sym[(k, j)] = c64(1.0, 0.0);
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(d, d);
            asym[(j, k)] = c64(0.0, -1.0);
            asym[(k, j)] = c64(0.0, 1.0);
            basis.push(asym);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = c64(norm, 0.0);
        }
        diag[(l, l)] = c64(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}

fn chart_point(
    u0: &UnitaryMatrix,
    basis: &[ComplexMatrix],
    params: &[f64],
    tol: &ToleranceSet,
) -> Result<UnitaryMatrix> {
    let d = u0.dim();
    let mut h = ComplexMatrix::zeros(d, d);
    for (b, &p) in basis.iter().zip(params.iter()) {
        if p == 0.0 {
            continue;
        }
        h = h.add(&b.scale(c64(p, 0.0)));
    }
    let rot = unitary_exp(&h, 1.0, tol)?;
    UnitaryMatrix::new(u0.matrix().matmul(rot.matrix()), tol)
}

struct RestartResult {
    best: f64,
    params: Vec<f64>,
    evaluations: u64,
    exhausted: bool,
}

fn run_restart(cfg: &ProbeConfig, restart: u32, tol: &ToleranceSet) -> Result<RestartResult> {
    let d_j = cfg.rho_s.dim() * cfg.rho_e.dim();
    let basis = gell_mann_basis(d_j);
    let mut rng = cfg.seed.with_stream(restart as u64).rng();
    let u0 = haar_unitary_from(d_j, &mut rng);

    let eval = |params: &[f64]| -> Result<f64> {
        let u = chart_point(&u0, &basis, params, tol)?;
        let sigma = evolve(&cfg.rho_s, &cfg.rho_e, &u, tol)?;
        Ok(petz_renyi(&cfg.rho_s, &sigma, cfg.alpha, tol)?.value())
    };

    let mut params = vec![0.0; basis.len()];
    let mut best = eval(&params)?;
    let mut evaluations = 0u64;
    let mut exhausted = false;
    let mut step = cfg.initial_step;

    'search: while step >= cfg.min_step {
        let mut improved = false;
        for i in 0..params.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= cfg.budget {
                    exhausted = true;
                    break 'search;
                }
                params[i] += dir * step;
                evaluations += 1;
                match eval(&params) {
                    Ok(v) if v > best + IMPROVE_TOL => {
                        best = v;
                        improved = true;
                    }
                    Ok(_) => params[i] -= dir * step,
                    Err(e) => return Err(e),
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(RestartResult {
        best,
        params,
        evaluations,
        exhausted,
    })
}

/// Maximizes the Petz divergence of the evolved state over joint unitaries
/// and reports the remaining gap to the spectral bound.
pub fn probe_tightness(cfg: &ProbeConfig, tol: &ToleranceSet) -> Result<ProbeOutcome> {
    cfg.validate()?;
    let bound = divergence_bound(
        &cfg.rho_s.spectrum(tol)?,
        &cfg.rho_e.spectrum(tol)?,
        cfg.alpha,
        tol,
    )?;

    let restarts: Result<Vec<RestartResult>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(cfg, r, tol))
        .collect();
    let restarts = restarts?;

    let mut best_idx = 0;
    for (i, r) in restarts.iter().enumerate() {
        if r.best > restarts[best_idx].best {
            best_idx = i;
        }
    }
    let evaluations = restarts.iter().map(|r| r.evaluations).sum();
    let budget_exhausted = restarts.iter().any(|r| r.exhausted);
    let best = &restarts[best_idx];

    Ok(ProbeOutcome {
        best_value: best.best,
        bound,
        gap: margin_upper(best.best, bound),
        params: best.params.clone(),
        evaluations,
        budget_exhausted,
        restart_of_best: best_idx as u32,
    })
}
