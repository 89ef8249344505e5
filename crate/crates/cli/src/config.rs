use std::fs;
use std::path::Path;

use renyi_reach::linalg::{DensityMatrix, RngSeed, Spectrum};
use renyi_reach::harness::StateSource;
use renyi_reach::ToleranceSet;
use serde::Deserialize;

pub const SEED_ENV: &str = "RENYI_REACH_SEED";

/// On-disk settings for the verify and tur campaigns. Field names match the
/// library configuration so a serialized echo can be fed back in.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub d_s: Option<usize>,
    pub d_e: Option<usize>,
    pub alpha_grid: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<RngSeed>,
    pub ensemble: Option<String>,
    pub lambda_s: Option<Vec<f64>>,
    pub lambda_e: Option<Vec<f64>>,
    pub povm_outcomes: Option<usize>,
}

/// On-disk settings for the estimation experiment.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFile {
    pub lambda_s: Option<Vec<f64>>,
    pub lambda_e: Option<Vec<f64>>,
    pub theta_true: Option<f64>,
    pub theta_0: Option<f64>,
    pub r: Option<Vec<u32>>,
    pub shots: Option<u64>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_step: Option<f64>,
    pub seed: Option<RngSeed>,
}

pub fn load_file<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, String> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("config file {}: {e}", path.display()))
}

/// Seed priority: explicit flag, then config file, then the environment
/// variable, then a fixed default. A malformed environment value is an error
/// rather than a silent fallback.
pub fn resolve_seed(flag: Option<u64>, file: Option<RngSeed>) -> Result<RngSeed, String> {
    if let Some(v) = flag {
        return Ok(RngSeed::new(v, 0));
    }
    if let Some(s) = file {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse::<u64>()
            .map(|v| RngSeed::new(v, 0))
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got {text:?}")),
        Err(_) => Ok(RngSeed::new(0, 0)),
    }
}

pub fn tolerances(overridden: Option<f64>) -> Result<ToleranceSet, String> {
    match overridden {
        None => Ok(ToleranceSet::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(ToleranceSet {
            hermiticity: t,
            trace: t,
            psd: t,
            unitarity: t,
        }),
        Some(t) => Err(format!("tolerance must be a positive finite number, got {t}")),
    }
}

pub fn spectrum(values: &[f64], name: &str, tol: &ToleranceSet) -> Result<Spectrum, String> {
    Spectrum::new(values.to_vec(), tol).map_err(|e| format!("{name}: {e}"))
}

/// Builds the trial state source from the merged ensemble name and spectra.
/// Spectra given without an ensemble name select explicit diagonal states.
pub fn state_source(
    ensemble: Option<&str>,
    lambda_s: Option<&[f64]>,
    lambda_e: Option<&[f64]>,
    tol: &ToleranceSet,
) -> Result<StateSource, String> {
    let name = match ensemble {
        Some(n) => n,
        None if lambda_s.is_some() || lambda_e.is_some() => "explicit",
        None => "hilbert-schmidt",
    };
    let spectra = |tag: &str| -> Result<(Spectrum, Spectrum), String> {
        let s = lambda_s.ok_or_else(|| format!("ensemble {tag} requires --lambda-s"))?;
        let e = lambda_e.ok_or_else(|| format!("ensemble {tag} requires --lambda-e"))?;
        Ok((spectrum(s, "lambda-s", tol)?, spectrum(e, "lambda-e", tol)?))
    };
    match name {
        "hilbert-schmidt" => Ok(StateSource::RandomHilbertSchmidt),
        "fixed-spectra" => {
            let (s, e) = spectra("fixed-spectra")?;
            Ok(StateSource::RandomFixedSpectra { lambda_s: s, lambda_e: e })
        }
        "explicit" => {
            let (s, e) = spectra("explicit")?;
            let rho_s = DensityMatrix::from_diag(s.values(), tol).map_err(|e| e.to_string())?;
            let rho_e = DensityMatrix::from_diag(e.values(), tol).map_err(|e| e.to_string())?;
            Ok(StateSource::Explicit { rho_s, rho_e })
        }
        other => Err(format!(
            "unknown ensemble {other:?}; expected hilbert-schmidt, fixed-spectra, or explicit"
        )),
    }
}
