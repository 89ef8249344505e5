use std::collections::{BTreeMap, BTreeSet};

use renyi_reach::bounds::{block_sums, bound_set, extremal_unitary, joint_spectrum, optimal_spectrum};
use renyi_reach::harness::{
    default_grid, evolve, probe_tightness, run_estimation, swap_generator,
    verify_divergence_bound, verify_majorization, verify_tur, CampaignSummary, EstimationConfig,
    EstimationReport, MajorizationSummary, ProbeConfig, StateSource, TrialRecord, VerifyConfig,
};
use renyi_reach::linalg::{random_density_from, DensityMatrix, Ensemble, Povm, RngSeed, Spectrum};
use renyi_reach::report::{format_ext, ExtReal};
use renyi_reach::{ToleranceSet, VIOLATION_TOL};
use serde::Serialize;

use crate::args::{BoundArgs, CampaignArgs, Command, EstimateArgs, Format, ProbeArgs, SaturateArgs};
use crate::config::{self, CampaignFile, EstimateFile};
use crate::output;

pub fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Bound(a) => bound(a),
        Command::Verify(a) => campaign(a, CampaignKind::Verify),
        Command::Tur(a) => campaign(a, CampaignKind::Tur),
        Command::Estimate(a) => estimate(a),
        Command::Saturate(a) => saturate(a),
        Command::Probe(a) => probe(a),
    }
}

fn lib_err(e: renyi_reach::Error) -> String {
    e.to_string()
}

/// One spectrum pair evaluated at one divergence order. Spectra are echoed
/// in descending order to match the optimal-spectrum convention.
#[derive(Debug, Serialize)]
struct BoundRow {
    alpha: f64,
    d_s: usize,
    d_e: usize,
    lambda_s: Vec<f64>,
    lambda_e: Vec<f64>,
    c_sums: Vec<f64>,
    optimal_spectrum: Vec<f64>,
    divergence_bound: ExtReal,
    bures_bound: f64,
    tur_bound: ExtReal,
    estimator_bounds: BTreeMap<u32, ExtReal>,
}

#[derive(Debug, Serialize)]
struct BoundReport {
    rows: Vec<BoundRow>,
}

fn bound_rows_for_pair(
    lambda_s: &Spectrum,
    lambda_e: &Spectrum,
    alphas: &[f64],
    r_values: &[u32],
    tol: &ToleranceSet,
) -> Result<Vec<BoundRow>, String> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let set = bound_set(lambda_s, lambda_e, alpha, r_values, tol).map_err(lib_err)?;
        rows.push(BoundRow {
            alpha,
            d_s: lambda_s.len(),
            d_e: lambda_e.len(),
            lambda_s: lambda_s.descending(),
            lambda_e: lambda_e.descending(),
            c_sums: set.c_sums,
            optimal_spectrum: set.optimal_spectrum,
            divergence_bound: set.divergence_bound.into(),
            bures_bound: set.bures_bound,
            tur_bound: set.tur_bound.into(),
            estimator_bounds: set
                .estimator_bounds
                .into_iter()
                .map(|(r, b)| (r, ExtReal::from(b)))
                .collect(),
        });
    }
    Ok(rows)
}

fn bound_csv(rows: &[BoundRow], r_values: &[u32]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = [
        "alpha", "d_s", "d_e", "lambda_s", "lambda_e", "div_bound", "bures_bound", "tur_bound",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for r in r_values {
        header.push(format!("est_bound_r{r}"));
    }
    let join = |v: &[f64]| v.iter().map(|&x| format_ext(x)).collect::<Vec<_>>().join(";");
    let cells = rows
        .iter()
        .map(|row| {
            let mut c = vec![
                format_ext(row.alpha),
                row.d_s.to_string(),
                row.d_e.to_string(),
                join(&row.lambda_s),
                join(&row.lambda_e),
                format_ext(row.divergence_bound.value()),
                format_ext(row.bures_bound),
                format_ext(row.tur_bound.value()),
            ];
            for r in r_values {
                c.push(row.estimator_bounds.get(r).map_or_else(String::new, |b| format_ext(b.value())));
            }
            c
        })
        .collect();
    (header, cells)
}

fn dim_arg(v: Option<usize>, name: &str) -> Result<usize, String> {
    match v {
        Some(d) if d > 0 => Ok(d),
        Some(_) => Err(format!("--{name} must be at least 1")),
        None => Err(format!("sampled mode requires --{name}")),
    }
}

fn bound(args: BoundArgs) -> Result<i32, String> {
    let tol = config::tolerances(args.tolerance)?;
    if args.alpha.is_empty() {
        return Err("alpha range is empty".into());
    }
    let r_values: Vec<u32> = args.r.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if r_values.is_empty() || r_values[0] == 0 {
        return Err("repetition counts must be at least 1".into());
    }
    let mut rows = Vec::new();
    match (args.lambda_s.as_deref(), args.lambda_e.as_deref(), args.samples) {
        (Some(s), Some(e), None) => {
            let ls = config::spectrum(s, "lambda-s", &tol)?;
            let le = config::spectrum(e, "lambda-e", &tol)?;
            rows.extend(bound_rows_for_pair(&ls, &le, &args.alpha, &r_values, &tol)?);
        }
        (None, None, Some(n)) => {
            let d_s = dim_arg(args.d_s, "ds")?;
            let d_e = dim_arg(args.d_e, "de")?;
            let seed = config::resolve_seed(args.seed, None)?;
            for i in 0..n {
                let mut rng = seed.with_stream(i).rng();
                let rho_s = random_density_from(d_s, &Ensemble::HilbertSchmidt, &mut rng, &tol)
                    .map_err(lib_err)?;
                let rho_e = random_density_from(d_e, &Ensemble::HilbertSchmidt, &mut rng, &tol)
                    .map_err(lib_err)?;
                let ls = rho_s.spectrum(&tol).map_err(lib_err)?;
                let le = rho_e.spectrum(&tol).map_err(lib_err)?;
                rows.extend(bound_rows_for_pair(&ls, &le, &args.alpha, &r_values, &tol)?);
            }
        }
        (None, None, None) => {
            return Err("provide --lambda-s and --lambda-e, or --samples with --ds and --de".into())
        }
        _ => return Err("provide both --lambda-s and --lambda-e".into()),
    }
    match args.format {
        Format::Json => output::write_json(&BoundReport { rows }, args.output.as_deref())?,
        Format::Csv => {
            let (header, cells) = bound_csv(&rows, &r_values);
            output::write_csv(&header, &cells, args.output.as_deref())?;
        }
    }
    Ok(0)
}

#[derive(Debug, Clone, Copy)]
enum CampaignKind {
    Verify,
    Tur,
}

#[derive(Debug, Serialize)]
struct CampaignEcho {
    d_s: usize,
    d_e: usize,
    alpha_grid: Vec<f64>,
    trials: u64,
    seed: RngSeed,
    ensemble: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_e: Option<Vec<f64>>,
    povm_outcomes: usize,
}

#[derive(Debug, Serialize)]
struct CampaignReport {
    config: CampaignEcho,
    summary: CampaignSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    majorization: Option<MajorizationSummary>,
    records_scope: String,
    records: Vec<TrialRecord>,
}

fn campaign(args: CampaignArgs, kind: CampaignKind) -> Result<i32, String> {
    let tol = config::tolerances(args.tolerance)?;
    let file: CampaignFile = config::load_file(args.config.as_deref())?;
    let lambda_s = args.lambda_s.or(file.lambda_s);
    let lambda_e = args.lambda_e.or(file.lambda_e);
    let d_s = args
        .d_s
        .or(file.d_s)
        .or_else(|| lambda_s.as_ref().map(Vec::len))
        .unwrap_or(2);
    let d_e = args
        .d_e
        .or(file.d_e)
        .or_else(|| lambda_e.as_ref().map(Vec::len))
        .unwrap_or(2);
    let alpha_grid = args
        .alpha
        .or(file.alpha_grid)
        .unwrap_or_else(|| vec![0.5, 0.9, 1.5, 2.0]);
    if matches!(kind, CampaignKind::Verify) && alpha_grid.is_empty() {
        return Err("alpha grid is empty".into());
    }
    let trials = args.trials.or(file.trials).unwrap_or(1000);
    let seed = config::resolve_seed(args.seed, file.seed)?;
    let povm_outcomes = args.povm_outcomes.or(file.povm_outcomes).unwrap_or(2);
    let ensemble = args.ensemble.or(file.ensemble);
    let state_source = config::state_source(
        ensemble.as_deref(),
        lambda_s.as_deref(),
        lambda_e.as_deref(),
        &tol,
    )?;
    let ensemble_name = match &state_source {
        StateSource::Explicit { .. } => "explicit",
        StateSource::RandomHilbertSchmidt => "hilbert-schmidt",
        StateSource::RandomFixedSpectra { .. } => "fixed-spectra",
    };
    let cfg = VerifyConfig {
        d_s,
        d_e,
        alpha_grid: alpha_grid.clone(),
        trials,
        seed,
        state_source,
        povm_outcomes,
    };
    let (mut records, summary, majorization) = match kind {
        CampaignKind::Verify => {
            let (r, s) = verify_divergence_bound(&cfg, &tol).map_err(lib_err)?;
            let m = verify_majorization(&cfg, &tol).map_err(lib_err)?;
            (r, s, Some(m))
        }
        CampaignKind::Tur => {
            let (r, s) = verify_tur(&cfg, &tol).map_err(lib_err)?;
            (r, s, None)
        }
    };
    let records_scope = if args.full { "all" } else { "worst-10" };
    if !args.full {
        records.sort_by(|a, b| a.margin.value().total_cmp(&b.margin.value()));
        records.truncate(10);
    }
    let failures = summary.violations + majorization.as_ref().map_or(0, |m| m.failures);
    let report = CampaignReport {
        config: CampaignEcho {
            d_s,
            d_e,
            alpha_grid,
            trials,
            seed,
            ensemble: ensemble_name.into(),
            lambda_s,
            lambda_e,
            povm_outcomes,
        },
        summary,
        majorization,
        records_scope: records_scope.into(),
        records,
    };
    output::write_json(&report, args.output.as_deref())?;
    Ok(if failures > 0 { 2 } else { 0 })
}

#[derive(Debug, Serialize)]
struct EstimateEcho {
    lambda_s: Vec<f64>,
    lambda_e: Vec<f64>,
    interaction: String,
    measurement: String,
    theta_true: f64,
    theta_0: f64,
    grid_min: f64,
    grid_max: f64,
    grid_step: f64,
    shots: u64,
    seed: RngSeed,
}

#[derive(Debug, Serialize)]
struct EstimateCliReport {
    config: EstimateEcho,
    experiments: Vec<EstimationReport>,
}

fn estimate(args: EstimateArgs) -> Result<i32, String> {
    let tol = config::tolerances(args.tolerance)?;
    let file: EstimateFile = config::load_file(args.config.as_deref())?;
    let lambda_s = args.lambda_s.or(file.lambda_s).unwrap_or_else(|| vec![0.6, 0.4]);
    let lambda_e = args.lambda_e.or(file.lambda_e).unwrap_or_else(|| vec![0.9, 0.1]);
    let theta_true = args.theta_true.or(file.theta_true).unwrap_or(0.3);
    let theta_0 = args.theta_0.or(file.theta_0).unwrap_or(0.0);
    let r_values = args.r.or(file.r).unwrap_or_else(|| vec![1]);
    let shots = args.shots.or(file.shots).unwrap_or(10_000);
    let seed = config::resolve_seed(args.seed, file.seed)?;
    let (default_min, default_max, default_step) = default_grid(theta_0);
    let grid_min = args.grid_min.or(file.grid_min).unwrap_or(default_min);
    let grid_max = args.grid_max.or(file.grid_max).unwrap_or(default_max);
    let grid_step = args.grid_step.or(file.grid_step).unwrap_or(default_step);
    if lambda_s.len() != lambda_e.len() {
        return Err("the swap interaction requires equal system and environment dimensions".into());
    }
    if r_values.is_empty() || r_values.iter().any(|&r| r == 0) {
        return Err("repetition counts must be at least 1".into());
    }
    let d = lambda_s.len();
    let ls = config::spectrum(&lambda_s, "lambda-s", &tol)?;
    let le = config::spectrum(&lambda_e, "lambda-e", &tol)?;
    let rho_s = DensityMatrix::from_diag(ls.values(), &tol).map_err(lib_err)?;
    let rho_e = DensityMatrix::from_diag(le.values(), &tol).map_err(lib_err)?;
    let mut experiments = Vec::with_capacity(r_values.len());
    let mut violated = false;
    // Runs for different repetition counts share the seed deliberately:
    // common random numbers keep the reports comparable across R.
    for &r in &r_values {
        let cfg = EstimationConfig {
            rho_s: rho_s.clone(),
            rho_e: rho_e.clone(),
            generator: swap_generator(d),
            povm: Povm::computational(d),
            theta_true,
            theta_0,
            grid_min,
            grid_max,
            grid_step,
            r,
            shots,
            seed,
        };
        let report = run_estimation(&cfg, &tol).map_err(lib_err)?;
        violated |= report.variance_violation || report.mse_violation || report.chain_violation;
        experiments.push(report);
    }
    let report = EstimateCliReport {
        config: EstimateEcho {
            lambda_s,
            lambda_e,
            interaction: "swap".into(),
            measurement: "computational".into(),
            theta_true,
            theta_0,
            grid_min,
            grid_max,
            grid_step,
            shots,
            seed,
        },
        experiments,
    };
    output::write_json(&report, args.output.as_deref())?;
    Ok(if violated { 2 } else { 0 })
}

#[derive(Debug, Serialize)]
struct SaturateReport {
    lambda_s: Vec<f64>,
    lambda_e: Vec<f64>,
    alpha_grid: Vec<f64>,
    optimal_spectrum: Vec<f64>,
    achieved_spectrum: Vec<f64>,
    max_spectrum_deviation: f64,
    summary: CampaignSummary,
    records: Vec<TrialRecord>,
}

fn saturate(args: SaturateArgs) -> Result<i32, String> {
    let tol = config::tolerances(args.tolerance)?;
    if args.alpha.is_empty() {
        return Err("alpha range is empty".into());
    }
    let ls = config::spectrum(&args.lambda_s, "lambda-s", &tol)?;
    let le = config::spectrum(&args.lambda_e, "lambda-e", &tol)?;
    let rho_s = DensityMatrix::from_diag(ls.values(), &tol).map_err(lib_err)?;
    let rho_e = DensityMatrix::from_diag(le.values(), &tol).map_err(lib_err)?;
    let u = extremal_unitary(&rho_s, &rho_e, &tol).map_err(lib_err)?;
    let sigma = evolve(&rho_s, &rho_e, &u, &tol).map_err(lib_err)?;
    let achieved = sigma.spectrum(&tol).map_err(lib_err)?.descending();
    let optimal = optimal_spectrum(&block_sums(&joint_spectrum(&ls, &le)), &tol)
        .map_err(lib_err)?
        .descending();
    let max_spectrum_deviation = achieved
        .iter()
        .zip(&optimal)
        .map(|(a, o)| (a - o).abs())
        .fold(0.0f64, f64::max);
    let cfg = VerifyConfig {
        d_s: ls.len(),
        d_e: le.len(),
        alpha_grid: args.alpha.clone(),
        trials: 0,
        seed: RngSeed::new(0, 0),
        state_source: StateSource::Explicit { rho_s, rho_e },
        povm_outcomes: 2,
    };
    let (records, summary) = verify_divergence_bound(&cfg, &tol).map_err(lib_err)?;
    let code = if summary.violations > 0 { 2 } else { 0 };
    let report = SaturateReport {
        lambda_s: args.lambda_s,
        lambda_e: args.lambda_e,
        alpha_grid: args.alpha,
        optimal_spectrum: optimal,
        achieved_spectrum: achieved,
        max_spectrum_deviation,
        summary,
        records,
    };
    output::write_json(&report, args.output.as_deref())?;
    Ok(code)
}

#[derive(Debug, Serialize)]
struct ProbeReport {
    lambda_s: Vec<f64>,
    lambda_e: Vec<f64>,
    alpha: f64,
    restarts: u32,
    budget: u64,
    seed: RngSeed,
    best_value: ExtReal,
    bound: ExtReal,
    gap: ExtReal,
    evaluations: u64,
    budget_exhausted: bool,
    restart_of_best: u32,
    params: Vec<f64>,
}

fn probe(args: ProbeArgs) -> Result<i32, String> {
    let tol = config::tolerances(args.tolerance)?;
    let ls = config::spectrum(&args.lambda_s, "lambda-s", &tol)?;
    let le = config::spectrum(&args.lambda_e, "lambda-e", &tol)?;
    let rho_s = DensityMatrix::from_diag(ls.values(), &tol).map_err(lib_err)?;
    let rho_e = DensityMatrix::from_diag(le.values(), &tol).map_err(lib_err)?;
    let seed = config::resolve_seed(args.seed, None)?;
    let mut cfg = ProbeConfig::new(rho_s, rho_e, args.alpha, seed);
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    let outcome = probe_tightness(&cfg, &tol).map_err(lib_err)?;
    let code = if outcome.gap < -VIOLATION_TOL { 2 } else { 0 };
    let report = ProbeReport {
        lambda_s: args.lambda_s,
        lambda_e: args.lambda_e,
        alpha: args.alpha,
        restarts: cfg.restarts,
        budget: cfg.budget,
        seed,
        best_value: outcome.best_value.into(),
        bound: outcome.bound.into(),
        gap: outcome.gap.into(),
        evaluations: outcome.evaluations,
        budget_exhausted: outcome.budget_exhausted,
        restart_of_best: outcome.restart_of_best,
        params: outcome.params,
    };
    output::write_json(&report, args.output.as_deref())?;
    Ok(code)
}
