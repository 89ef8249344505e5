//! Sampling campaigns for the divergence, majorization, and fluctuation
//! bounds. Each trial owns RNG stream `trial index`, so campaigns are
//! reproducible record-for-record regardless of thread count.

use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bounds::{
    block_sums, bures_bound, divergence_bound, extremal_unitary, joint_spectrum, optimal_spectrum,
    tur_bound,
};
use crate::divergence::{
    bures_angle, chi_squared, measurement_distribution, petz_renyi, sandwiched_renyi,
};
use crate::error::{Error, Result};
use crate::harness::{evolve, CampaignSummary, Quantity, TrialRecord};
use crate::linalg::{
    haar_unitary_from, random_density_from, DensityMatrix, Ensemble, RngSeed, Spectrum,
    random_povm_from,
};
use crate::report::ExtReal;
use crate::tolerance::ToleranceSet;

/// Mean shifts below this leave the fluctuation ratio undefined; such
/// trials are recorded as vacuous.
pub const MEAN_SHIFT_TOL: f64 = 1e-8;

/// Where each trial's input states come from.
#[derive(Debug, Clone)]
pub enum StateSource {
    /// The same fixed pair every trial; only the unitary is resampled.
    Explicit {
        rho_s: DensityMatrix,
        rho_e: DensityMatrix,
    },
    /// Fresh Hilbert-Schmidt states per trial.
    RandomHilbertSchmidt,
    /// Haar-rotated states with fixed spectra per trial.
    RandomFixedSpectra {
        lambda_s: Spectrum,
        lambda_e: Spectrum,
    },
}

/// Campaign configuration shared by the verify entry points.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub d_s: usize,
    pub d_e: usize,
    pub alpha_grid: Vec<f64>,
    pub trials: u64,
    pub seed: RngSeed,
    pub state_source: StateSource,
    pub povm_outcomes: usize,
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.d_s == 0 || self.d_e == 0 {
            return Err(Error::InvalidConfig {
                detail: "system and environment dimensions must be positive".into(),
            });
        }
        for &alpha in &self.alpha_grid {
            crate::divergence::check_alpha(alpha)?;
        }
        match &self.state_source {
            StateSource::Explicit { rho_s, rho_e } => {
                if rho_s.dim() != self.d_s || rho_e.dim() != self.d_e {
                    return Err(Error::InvalidConfig {
                        detail: format!(
                            "explicit states have dimensions {}x{}, config says {}x{}",
                            rho_s.dim(),
                            rho_e.dim(),
                            self.d_s,
                            self.d_e
                        ),
                    });
                }
            }
            StateSource::RandomFixedSpectra { lambda_s, lambda_e } => {
                if lambda_s.len() != self.d_s || lambda_e.len() != self.d_e {
                    return Err(Error::InvalidConfig {
                        detail: format!(
                            "fixed spectra have lengths {}/{}, config says {}/{}",
                            lambda_s.len(),
                            lambda_e.len(),
                            self.d_s,
                            self.d_e
                        ),
                    });
                }
            }
            StateSource::RandomHilbertSchmidt => {}
        }
        Ok(())
    }
}

fn draw_states(
    cfg: &VerifyConfig,
    rng: &mut ChaCha12Rng,
    tol: &ToleranceSet,
) -> Result<(DensityMatrix, DensityMatrix)> {
    match &cfg.state_source {
        StateSource::Explicit { rho_s, rho_e } => Ok((rho_s.clone(), rho_e.clone())),
        StateSource::RandomHilbertSchmidt => {
            let rho_s = random_density_from(cfg.d_s, &Ensemble::HilbertSchmidt, rng, tol)?;
            let rho_e = random_density_from(cfg.d_e, &Ensemble::HilbertSchmidt, rng, tol)?;
            Ok((rho_s, rho_e))
        }
        StateSource::RandomFixedSpectra { lambda_s, lambda_e } => {
            let rho_s =
                random_density_from(cfg.d_s, &Ensemble::FixedSpectrum(lambda_s.clone()), rng, tol)?;
            let rho_e =
                random_density_from(cfg.d_e, &Ensemble::FixedSpectrum(lambda_e.clone()), rng, tol)?;
            Ok((rho_s, rho_e))
        }
    }
}

fn divergence_bounds_for(
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    alpha_grid: &[f64],
    tol: &ToleranceSet,
) -> Result<(Vec<f64>, f64)> {
    let ls = rho_s.spectrum(tol)?;
    let le = rho_e.spectrum(tol)?;
    let per_alpha = alpha_grid
        .iter()
        .map(|&a| divergence_bound(&ls, &le, a, tol))
        .collect::<Result<Vec<f64>>>()?;
    Ok((per_alpha, bures_bound(&ls, &le, tol)?))
}

fn divergence_rows(
    trial: i64,
    rho_s: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha_grid: &[f64],
    div_bounds: &[f64],
    bures_b: f64,
    tol: &ToleranceSet,
) -> Result<Vec<TrialRecord>> {
    let mut rows = Vec::with_capacity(2 * alpha_grid.len() + 1);
    for (&alpha, &bound) in alpha_grid.iter().zip(div_bounds.iter()) {
        let petz = petz_renyi(rho_s, sigma, alpha, tol)?.value();
        rows.push(TrialRecord::upper(
            trial,
            Quantity::PetzRenyi,
            Some(alpha),
            petz,
            bound,
            false,
        ));
        let sand = sandwiched_renyi(rho_s, sigma, alpha, tol)?.value();
        rows.push(TrialRecord::upper(
            trial,
            Quantity::SandwichedRenyi,
            Some(alpha),
            sand,
            bound,
            false,
        ));
    }
    let angle = bures_angle(rho_s, sigma, tol)?;
    rows.push(TrialRecord::upper(
        trial,
        Quantity::BuresAngle,
        None,
        angle,
        bures_b,
        false,
    ));
    Ok(rows)
}

/// Samples Haar unitaries and checks every measured divergence against the
/// spectral bound. With explicit input states, a deterministic row pair for
/// the extremal unitary is appended as trial -1.
pub fn verify_divergence_bound(
    cfg: &VerifyConfig,
    tol: &ToleranceSet,
) -> Result<(Vec<TrialRecord>, CampaignSummary)> {
    cfg.validate()?;
    let fixed = match &cfg.state_source {
        StateSource::Explicit { rho_s, rho_e } => {
            Some(divergence_bounds_for(rho_s, rho_e, &cfg.alpha_grid, tol)?)
        }
        _ => None,
    };

    let per_trial: Result<Vec<Vec<TrialRecord>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = cfg.seed.with_stream(t).rng();
            let (rho_s, rho_e) = draw_states(cfg, &mut rng, tol)?;
            let u = haar_unitary_from(cfg.d_s * cfg.d_e, &mut rng);
            let sigma = evolve(&rho_s, &rho_e, &u, tol)?;
            let (div_bounds, bures_b) = match &fixed {
                Some(pair) => pair.clone(),
                None => divergence_bounds_for(&rho_s, &rho_e, &cfg.alpha_grid, tol)?,
            };
            divergence_rows(
                t as i64,
                &rho_s,
                &sigma,
                &cfg.alpha_grid,
                &div_bounds,
                bures_b,
                tol,
            )
        })
        .collect();
    let mut records: Vec<TrialRecord> = per_trial?.into_iter().flatten().collect();

    if let StateSource::Explicit { rho_s, rho_e } = &cfg.state_source {
        let (div_bounds, bures_b) = fixed.expect("explicit source precomputes bounds");
        let u = extremal_unitary(rho_s, rho_e, tol)?;
        let sigma = evolve(rho_s, rho_e, &u, tol)?;
        records.extend(divergence_rows(
            -1,
            rho_s,
            &sigma,
            &cfg.alpha_grid,
            &div_bounds,
            bures_b,
            tol,
        )?);
    }

    let summary = CampaignSummary::from_records(cfg.trials, &records);
    Ok((records, summary))
}

/// Outcome of a majorization sweep over sampled dynamics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MajorizationSummary {
    pub trials: u64,
    pub failures: u64,
    /// Smallest prefix-sum slack seen across all trials.
    pub min_slack: ExtReal,
    /// Largest entrywise gap between the extremal output spectrum and the
    /// optimal one; present only for explicit input states.
    pub extremal_deviation: Option<f64>,
}

/// Checks that the optimal spectrum majorizes every sampled output spectrum.
pub fn verify_majorization(cfg: &VerifyConfig, tol: &ToleranceSet) -> Result<MajorizationSummary> {
    cfg.validate()?;
    let fixed_optimal = match &cfg.state_source {
        StateSource::Explicit { rho_s, rho_e } => Some(optimal_output(rho_s, rho_e, tol)?),
        _ => None,
    };

    let per_trial: Result<Vec<(bool, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = cfg.seed.with_stream(t).rng();
            let (rho_s, rho_e) = draw_states(cfg, &mut rng, tol)?;
            let u = haar_unitary_from(cfg.d_s * cfg.d_e, &mut rng);
            let sigma = evolve(&rho_s, &rho_e, &u, tol)?;
            let optimal = match &fixed_optimal {
                Some(s) => s.clone(),
                None => optimal_output(&rho_s, &rho_e, tol)?,
            };
            let observed = sigma.spectrum(tol)?;
            let ok = crate::majorization::majorizes(&optimal, &observed);
            let slack =
                crate::majorization::majorization_slack(&optimal.descending(), &observed.descending());
            Ok((ok, slack))
        })
        .collect();
    let per_trial = per_trial?;

    let failures = per_trial.iter().filter(|(ok, _)| !ok).count() as u64;
    let min_slack = per_trial
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::INFINITY, f64::min);

    let extremal_deviation = match &cfg.state_source {
        StateSource::Explicit { rho_s, rho_e } => {
            let optimal = fixed_optimal.expect("explicit source precomputes the optimal spectrum");
            let u = extremal_unitary(rho_s, rho_e, tol)?;
            let sigma = evolve(rho_s, rho_e, &u, tol)?;
            let observed = sigma.spectrum(tol)?;
            let dev = optimal
                .descending()
                .iter()
                .zip(observed.descending().iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Some(dev)
        }
        _ => None,
    };

    Ok(MajorizationSummary {
        trials: cfg.trials,
        failures,
        min_slack: ExtReal(min_slack),
        extremal_deviation,
    })
}

fn optimal_output(
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    tol: &ToleranceSet,
) -> Result<Spectrum> {
    let joint = joint_spectrum(&rho_s.spectrum(tol)?, &rho_e.spectrum(tol)?);
    optimal_spectrum(&block_sums(&joint), tol)
}

/// Samples measurements on evolved states and checks the fluctuation bound
/// plus the chi-squared chain inequality behind it.
pub fn verify_tur(
    cfg: &VerifyConfig,
    tol: &ToleranceSet,
) -> Result<(Vec<TrialRecord>, CampaignSummary)> {
    cfg.validate()?;
    if cfg.povm_outcomes < 2 {
        return Err(Error::InvalidConfig {
            detail: "fluctuation campaigns need at least two measurement outcomes".into(),
        });
    }
    let fixed_bound = match &cfg.state_source {
        StateSource::Explicit { rho_s, rho_e } => {
            Some(tur_bound(&rho_s.spectrum(tol)?, &rho_e.spectrum(tol)?, tol)?)
        }
        _ => None,
    };

    let per_trial: Result<Vec<Vec<TrialRecord>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = cfg.seed.with_stream(t).rng();
            let (rho_s, rho_e) = draw_states(cfg, &mut rng, tol)?;
            let u = haar_unitary_from(cfg.d_s * cfg.d_e, &mut rng);
            let sigma = evolve(&rho_s, &rho_e, &u, tol)?;
            let povm = random_povm_from(cfg.d_s, cfg.povm_outcomes, &mut rng, tol)?;
            let bound = match fixed_bound {
                Some(b) => b,
                None => tur_bound(&rho_s.spectrum(tol)?, &rho_e.spectrum(tol)?, tol)?,
            };
            let mut rows = Vec::with_capacity(2);
            rows.push(tur_row(t as i64, &rho_s, &sigma, &povm, bound, tol)?);
            rows.push(chain_row(t as i64, &rho_s, &sigma, &povm, tol)?);
            Ok(rows)
        })
        .collect();
    let records: Vec<TrialRecord> = per_trial?.into_iter().flatten().collect();
    let summary = CampaignSummary::from_records(cfg.trials, &records);
    Ok((records, summary))
}

pub(crate) fn tur_row(
    trial: i64,
    rho_s: &DensityMatrix,
    sigma: &DensityMatrix,
    povm: &crate::linalg::Povm,
    bound: f64,
    _tol: &ToleranceSet,
) -> Result<TrialRecord> {
    let p_rho = measurement_distribution(rho_s, povm)?;
    let p_sigma = measurement_distribution(sigma, povm)?;
    let shift = p_sigma.label_mean() - p_rho.label_mean();
    if shift.abs() < MEAN_SHIFT_TOL {
        return Ok(TrialRecord::lower(
            trial,
            Quantity::TurRatio,
            None,
            f64::INFINITY,
            bound,
            true,
        ));
    }
    let lhs = p_sigma.label_variance() / (shift * shift);
    Ok(TrialRecord::lower(
        trial,
        Quantity::TurRatio,
        None,
        lhs,
        bound,
        false,
    ))
}

fn chain_row(
    trial: i64,
    rho_s: &DensityMatrix,
    sigma: &DensityMatrix,
    povm: &crate::linalg::Povm,
    tol: &ToleranceSet,
) -> Result<TrialRecord> {
    let p_rho = measurement_distribution(rho_s, povm)?;
    let p_sigma = measurement_distribution(sigma, povm)?;
    let chi2 = chi_squared(&p_rho, &p_sigma)?.value();
    let lhs = chi2.ln_1p();
    let d2 = petz_renyi(rho_s, sigma, 2.0, tol)?.value();
    Ok(TrialRecord::upper(
        trial,
        Quantity::Chain,
        None,
        lhs,
        d2,
        false,
    ))
}
