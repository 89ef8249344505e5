//! Quantum and classical divergences: Petz and sandwiched Renyi relative
//! entropies, quantum relative entropy, fidelity and Bures angle, classical
//! Renyi and chi-squared divergences, and measurement-induced outcome
//! distributions.
//!
//! Conventions, fixed once here: natural logarithms, 0 ln 0 = 0, 0^p = 0
//! for p > 0, and eigenvalues at or below [`SUPPORT_THRESHOLD`] count as
//! outside the support. For alpha > 1 a state with mass outside the second
//! argument's support has divergence +inf; for alpha in (0,1) the trace
//! runs over the support intersection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, matrix_power_psd, DensityMatrix, Povm};
use crate::tolerance::{ToleranceSet, SUPPORT_THRESHOLD};

/// Mass of the first argument tolerated outside the second argument's
/// support before the divergence is declared infinite.
pub(crate) const KERNEL_MASS_TOL: f64 = 1e-10;

/// Nonnegative extended real in nats. Round-off down to -1e-12 is clipped
/// to zero; anything more negative is preserved so tests can see it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceValue {
    value: f64,
}

impl DivergenceValue {
    pub(crate) fn new(raw: f64) -> Self {
        let value = if raw >= -1e-12 && raw < 0.0 { 0.0 } else { raw };
        Self { value }
    }

    pub fn infinity() -> Self {
        Self {
            value: f64::INFINITY,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::AlphaOutOfDomain { alpha });
    }
    Ok(())
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    Ok(())
}

/// Eigenvalues of both states plus the overlap weights
/// P_ij = |<v_i|w_j>|^2 between their eigenbases.
struct OverlapData {
    a: Vec<f64>,
    b: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

fn overlap_data(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &ToleranceSet) -> Result<OverlapData> {
    let er = rho.eig(tol)?;
    let es = sigma.eig(tol)?;
    let cross = er.vectors().matrix().dagger().matmul(es.vectors().matrix());
    let d = rho.dim();
    let weights = (0..d)
        .map(|i| (0..d).map(|j| cross[(i, j)].norm_sqr()).collect())
        .collect();
    Ok(OverlapData {
        a: er.values().to_vec(),
        b: es.values().to_vec(),
        weights,
    })
}

/// Mass of rho outside the support of sigma.
fn kernel_mass(data: &OverlapData) -> f64 {
    let mut mass = 0.0;
    for (i, &ai) in data.a.iter().enumerate() {
        if ai <= SUPPORT_THRESHOLD {
            continue;
        }
        for (j, &bj) in data.b.iter().enumerate() {
            if bj <= SUPPORT_THRESHOLD {
                mass += ai * data.weights[i][j];
            }
        }
    }
    mass
}

/// Petz-Renyi relative entropy (1/(alpha-1)) ln Tr[rho^alpha sigma^(1-alpha)].
pub fn petz_renyi(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    tol: &ToleranceSet,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    check_alpha(alpha)?;
    let data = overlap_data(rho, sigma, tol)?;
    if alpha > 1.0 && kernel_mass(&data) > KERNEL_MASS_TOL {
        return Ok(DivergenceValue::infinity());
    }
    let mut trace = 0.0;
    for (i, &ai) in data.a.iter().enumerate() {
        if ai <= SUPPORT_THRESHOLD {
            continue;
        }
        for (j, &bj) in data.b.iter().enumerate() {
            if bj <= SUPPORT_THRESHOLD {
                continue;
            }
            trace += ai.powf(alpha) * bj.powf(1.0 - alpha) * data.weights[i][j];
        }
    }
    Ok(DivergenceValue::new(trace.ln() / (alpha - 1.0)))
}

/// Sandwiched Renyi relative entropy
/// (1/(alpha-1)) ln Tr[(sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha))^alpha].
pub fn sandwiched_renyi(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    tol: &ToleranceSet,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    check_alpha(alpha)?;
    let es = sigma.eig(tol)?;
    let rotated = es.vectors().matrix().dagger().matmul(rho.matrix()).matmul(es.vectors().matrix());
    let support: Vec<usize> = (0..sigma.dim())
        .filter(|&j| es.values()[j] > SUPPORT_THRESHOLD)
        .collect();
    if alpha > 1.0 {
        let outside: f64 = (0..sigma.dim())
            .filter(|j| !support.contains(j))
            .map(|j| rotated[(j, j)].re)
            .sum();
        if outside > KERNEL_MASS_TOL {
            return Ok(DivergenceValue::infinity());
        }
    }
    // Conjugate the support block of rho by sigma^((1-alpha)/2alpha) in the
    // eigenbasis, where the power is diagonal.
    let exponent = (1.0 - alpha) / (2.0 * alpha);
    let k = support.len();
    let mut sandwiched = crate::linalg::ComplexMatrix::zeros(k, k);
    for (p, &jp) in support.iter().enumerate() {
        let dp = es.values()[jp].powf(exponent);
        for (q, &jq) in support.iter().enumerate() {
            let dq = es.values()[jq].powf(exponent);
            sandwiched[(p, q)] = rotated[(jp, jq)] * dp * dq;
        }
    }
    let mu = hermitian_eig(&sandwiched, tol)?;
    let trace: f64 = mu
        .values()
        .iter()
        .map(|&v| if v > 0.0 { v.powf(alpha) } else { 0.0 })
        .sum();
    Ok(DivergenceValue::new(trace.ln() / (alpha - 1.0)))
}

/// Quantum relative entropy Tr[rho (ln rho - ln sigma)].
pub fn quantum_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol: &ToleranceSet,
) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let data = overlap_data(rho, sigma, tol)?;
    if kernel_mass(&data) > KERNEL_MASS_TOL {
        return Ok(DivergenceValue::infinity());
    }
    let mut value = 0.0;
    for (i, &ai) in data.a.iter().enumerate() {
        if ai <= SUPPORT_THRESHOLD {
            continue;
        }
        value += ai * ai.ln();
        for (j, &bj) in data.b.iter().enumerate() {
            if bj <= SUPPORT_THRESHOLD {
                continue;
            }
            value -= ai * data.weights[i][j] * bj.ln();
        }
    }
    Ok(DivergenceValue::new(value))
}

/// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &ToleranceSet) -> Result<f64> {
    check_dims(rho, sigma)?;
    let root = matrix_power_psd(rho.matrix(), 0.5, tol)?;
    let inner = root.matmul(sigma.matrix()).matmul(&root);
    let eig = hermitian_eig(&inner, tol)?;
    let trace: f64 = eig
        .values()
        .iter()
        .map(|&v| if v > 0.0 { v.sqrt() } else { 0.0 })
        .sum();
    Ok((trace * trace).clamp(0.0, 1.0))
}

/// Bures angle arccos sqrt(Fid).
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &ToleranceSet) -> Result<f64> {
    Ok(fidelity(rho, sigma, tol)?.sqrt().acos())
}

/// Distribution of measurement outcomes with real labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    outcomes: Vec<f64>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probabilities.len() || outcomes.is_empty() {
            return Err(Error::InvalidDistribution {
                detail: format!(
                    "{} outcomes for {} probabilities",
                    outcomes.len(),
                    probabilities.len()
                ),
            });
        }
        for (i, a) in outcomes.iter().enumerate() {
            if outcomes[i + 1..].contains(a) {
                return Err(Error::InvalidDistribution {
                    detail: format!("duplicate outcome label {a}"),
                });
            }
        }
        let mut clipped = Vec::with_capacity(probabilities.len());
        for &p in &probabilities {
            if !p.is_finite() || p < -1e-10 {
                return Err(Error::InvalidDistribution {
                    detail: format!("negative probability {p:e}"),
                });
            }
            clipped.push(p.max(0.0));
        }
        let total: f64 = clipped.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution {
                detail: format!("probabilities sum to {total:.12}"),
            });
        }
        Ok(Self {
            outcomes,
            probabilities: clipped,
        })
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Expectation of a function given by its values on the outcome list.
    pub fn expectation(&self, g: &[f64]) -> f64 {
        self.probabilities.iter().zip(g.iter()).map(|(p, v)| p * v).sum()
    }

    /// Variance of a function given by its values on the outcome list.
    pub fn variance(&self, g: &[f64]) -> f64 {
        let mean = self.expectation(g);
        self.probabilities
            .iter()
            .zip(g.iter())
            .map(|(p, v)| p * (v - mean) * (v - mean))
            .sum()
    }

    /// Mean of the outcome labels themselves.
    pub fn label_mean(&self) -> f64 {
        self.expectation(&self.outcomes)
    }

    /// Variance of the outcome labels themselves.
    pub fn label_variance(&self) -> f64 {
        self.variance(&self.outcomes)
    }
}

fn check_outcomes(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<()> {
    if p.outcomes != q.outcomes {
        return Err(Error::OutcomeMismatch {
            detail: "distributions are over different outcome sets".into(),
        });
    }
    Ok(())
}

/// Classical Renyi divergence (1/(alpha-1)) ln sum P^alpha Q^(1-alpha)
/// over aligned outcomes.
pub fn classical_renyi(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_outcomes(p, q)?;
    check_alpha(alpha)?;
    let mut sum = 0.0;
    for (&pv, &qv) in p.probabilities.iter().zip(q.probabilities.iter()) {
        if pv <= 0.0 {
            continue;
        }
        if qv <= 0.0 {
            if alpha > 1.0 {
                return Ok(DivergenceValue::infinity());
            }
            continue;
        }
        sum += pv.powf(alpha) * qv.powf(1.0 - alpha);
    }
    Ok(DivergenceValue::new(sum.ln() / (alpha - 1.0)))
}

/// Chi-squared divergence sum (P-Q)^2/Q, with 0/0 = 0.
pub fn chi_squared(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<DivergenceValue> {
    check_outcomes(p, q)?;
    let mut sum = 0.0;
    for (&pv, &qv) in p.probabilities.iter().zip(q.probabilities.iter()) {
        if qv <= 0.0 {
            if pv > 0.0 {
                return Ok(DivergenceValue::infinity());
            }
            continue;
        }
        sum += (pv - qv) * (pv - qv) / qv;
    }
    Ok(DivergenceValue::new(sum))
}

/// Outcome distribution P(m|rho) = Tr[M_m rho] induced by measuring a POVM.
pub fn measurement_distribution(rho: &DensityMatrix, povm: &Povm) -> Result<OutcomeDistribution> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            actual: rho.dim(),
        });
    }
    let mut probabilities: Vec<f64> = povm
        .elements()
        .iter()
        .map(|m| m.matmul(rho.matrix()).trace().re.max(0.0))
        .collect();
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDistribution {
            detail: format!("measurement probabilities sum to {total:.12}"),
        });
    }
    for p in &mut probabilities {
        *p /= total;
    }
    OutcomeDistribution::new(povm.outcomes().to_vec(), probabilities)
}

/// Both sides of the variational representation of chi-squared: the
/// divergence itself and the witness ratio (E_P[g]-E_Q[g])^2 / Var_Q[g].
pub fn chi2_variational_gap(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
    g: &[f64],
) -> Result<(f64, f64)> {
    check_outcomes(p, q)?;
    if g.len() != p.len() {
        return Err(Error::OutcomeMismatch {
            detail: format!("witness has {} values for {} outcomes", g.len(), p.len()),
        });
    }
    let lhs = chi_squared(p, q)?.value();
    let mean_gap = p.expectation(g) - q.expectation(g);
    let var_q = q.variance(g);
    if var_q <= 0.0 {
        if mean_gap.abs() > 1e-12 {
            return Err(Error::DegenerateVariance { mean_gap });
        }
        return Ok((lhs, 0.0));
    }
    Ok((lhs, mean_gap * mean_gap / var_q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        random_density, random_povm, tensor_product, validate_density, DensityMatrix, Ensemble,
        RngSeed,
    };

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    fn diag(values: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diag(values, &tol()).unwrap()
    }

    fn dist(outcomes: &[f64], probs: &[f64]) -> OutcomeDistribution {
        OutcomeDistribution::new(outcomes.to_vec(), probs.to_vec()).unwrap()
    }

    #[test]
    fn petz_vanishes_on_identical_states() {
        let rho = diag(&[0.6, 0.4]);
        for alpha in [0.5, 2.0] {
            let v = petz_renyi(&rho, &rho, alpha, &tol()).unwrap();
            assert!(v.value() >= 0.0 && v.value() < 1e-12);
        }
    }

    #[test]
    fn petz_commuting_case_matches_scalar_sum() {
        let v = petz_renyi(&diag(&[0.9, 0.1]), &diag(&[0.5, 0.5]), 2.0, &tol()).unwrap();
        assert!((v.value() - 1.64f64.ln()).abs() < 1e-12);
        assert!((v.value() - 0.494696).abs() < 1e-6);
    }

    #[test]
    fn petz_detects_disjoint_supports() {
        let rho = diag(&[1.0, 0.0]);
        let sigma = diag(&[0.0, 1.0]);
        assert!(!petz_renyi(&rho, &sigma, 2.0, &tol()).unwrap().is_finite());
        assert!(!petz_renyi(&rho, &sigma, 0.5, &tol()).unwrap().is_finite());
    }

    #[test]
    fn petz_alpha_below_one_uses_support_intersection() {
        // rho full rank, sigma rank one: only the shared axis contributes,
        // so the trace term is sqrt(0.6) and the value is -ln 0.6.
        let rho = diag(&[0.6, 0.4]);
        let sigma = diag(&[1.0, 0.0]);
        let v = petz_renyi(&rho, &sigma, 0.5, &tol()).unwrap();
        let expected = 0.6f64.sqrt().ln() / (0.5 - 1.0);
        assert!((v.value() - expected).abs() < 1e-12);
    }

    #[test]
    fn sandwiched_equals_petz_for_commuting_pairs() {
        let rho = diag(&[0.9, 0.1]);
        let sigma = diag(&[0.5, 0.5]);
        for alpha in [0.5, 2.0, 3.0] {
            let p = petz_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
            let s = sandwiched_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
            assert!((p - s).abs() < 1e-10, "alpha {alpha}: {p} vs {s}");
        }
        let s = sandwiched_renyi(&rho, &sigma, 2.0, &tol()).unwrap();
        assert!((s.value() - 1.64f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sandwiched_never_exceeds_petz() {
        let base = RngSeed::new(41, 0);
        for t in 0..20 {
            let d = 2 + (t as usize % 3);
            let rho = random_density(d, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t), &tol())
                .unwrap();
            let sigma =
                random_density(d, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t + 1), &tol())
                    .unwrap();
            for alpha in [0.5, 2.0] {
                let p = petz_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                let s = sandwiched_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                assert!(p >= s - 1e-9, "alpha {alpha}: petz {p} < sandwiched {s}");
            }
        }
    }

    #[test]
    fn sandwiched_detects_disjoint_supports() {
        let rho = diag(&[1.0, 0.0]);
        let sigma = diag(&[0.0, 1.0]);
        assert!(!sandwiched_renyi(&rho, &sigma, 2.0, &tol()).unwrap().is_finite());
        assert!(!sandwiched_renyi(&rho, &sigma, 0.5, &tol()).unwrap().is_finite());
    }

    #[test]
    fn relative_entropy_matches_scalar_form() {
        let rho = diag(&[0.9, 0.1]);
        let sigma = diag(&[0.5, 0.5]);
        let v = quantum_relative_entropy(&rho, &sigma, &tol()).unwrap();
        let expected = 0.9 * (0.9f64 / 0.5).ln() + 0.1 * (0.1f64 / 0.5).ln();
        assert!((v.value() - expected).abs() < 1e-12);
        let same = quantum_relative_entropy(&rho, &rho, &tol()).unwrap();
        assert!(same.value() >= 0.0 && same.value() < 1e-12);
    }

    #[test]
    fn relative_entropy_is_infinite_outside_support() {
        let v =
            quantum_relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!(!v.is_finite());
    }

    #[test]
    fn petz_approaches_relative_entropy_near_unit_alpha() {
        let base = RngSeed::new(42, 0);
        for t in 0..10 {
            let rho =
                random_density(3, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t), &tol())
                    .unwrap();
            let sigma =
                random_density(3, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t + 1), &tol())
                    .unwrap();
            let qre = quantum_relative_entropy(&rho, &sigma, &tol()).unwrap().value();
            for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
                let v = petz_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                assert!((v - qre).abs() < 1e-3, "alpha {alpha}: {v} vs {qre}");
            }
        }
    }

    #[test]
    fn fidelity_closed_forms() {
        let rho = diag(&[0.9, 0.1]);
        let sigma = diag(&[0.5, 0.5]);
        assert!((fidelity(&rho, &rho, &tol()).unwrap() - 1.0).abs() < 1e-12);
        assert!(bures_angle(&rho, &rho, &tol()).unwrap() < 1e-6);
        let fid = fidelity(&rho, &sigma, &tol()).unwrap();
        assert!((fid - 0.8).abs() < 1e-10);
        let pure0 = diag(&[1.0, 0.0]);
        let pure1 = diag(&[0.0, 1.0]);
        assert!(fidelity(&pure0, &pure1, &tol()).unwrap() < 1e-12);
        let angle = bures_angle(&pure0, &pure1, &tol()).unwrap();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_exponential_of_half_sandwiched() {
        let base = RngSeed::new(43, 0);
        for t in 0..20 {
            let d = 2 + (t as usize % 3);
            let rho = random_density(d, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t), &tol())
                .unwrap();
            let sigma =
                random_density(d, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t + 1), &tol())
                    .unwrap();
            let fid = fidelity(&rho, &sigma, &tol()).unwrap();
            let half = sandwiched_renyi(&rho, &sigma, 0.5, &tol()).unwrap().value();
            assert!((fid - (-half).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_renyi_direct_sums() {
        let p = dist(&[0.0, 1.0], &[0.9, 0.1]);
        let q = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let v = classical_renyi(&p, &q, 2.0).unwrap();
        assert!((v.value() - 1.64f64.ln()).abs() < 1e-12);
        let same = classical_renyi(&p, &p, 2.0).unwrap();
        assert!(same.value() >= 0.0 && same.value() < 1e-12);
        let pure = dist(&[0.0, 1.0], &[1.0, 0.0]);
        let v = classical_renyi(&pure, &q, 0.5).unwrap();
        assert!((v.value() - 2f64.ln()).abs() < 1e-12);
        assert!(!classical_renyi(&q, &pure, 2.0).unwrap().is_finite());
    }

    #[test]
    fn classical_renyi_rejects_mismatched_outcomes() {
        let p = dist(&[0.0, 1.0], &[0.9, 0.1]);
        let q = dist(&[0.0, 2.0], &[0.5, 0.5]);
        assert!(matches!(
            classical_renyi(&p, &q, 2.0),
            Err(Error::OutcomeMismatch { .. })
        ));
    }

    #[test]
    fn chi_squared_matches_second_renyi() {
        let p = dist(&[0.0, 1.0], &[0.9, 0.1]);
        let q = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let chi = chi_squared(&p, &q).unwrap().value();
        assert!((chi - 0.64).abs() < 1e-12);
        let d2 = classical_renyi(&p, &q, 2.0).unwrap().value();
        assert!((d2.exp() - 1.0 - chi).abs() < 1e-10);
        assert!(chi_squared(&p, &p).unwrap().value() == 0.0);
        let pure0 = dist(&[0.0, 1.0], &[1.0, 0.0]);
        let pure1 = dist(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(!chi_squared(&pure0, &pure1).unwrap().is_finite());
    }

    #[test]
    fn measurement_distribution_closed_forms() {
        let rho = diag(&[0.6, 0.4]);
        let comp = Povm::computational(2);
        let p = measurement_distribution(&rho, &comp).unwrap();
        assert!((p.probabilities()[0] - 0.6).abs() < 1e-12);
        assert!((p.probabilities()[1] - 0.4).abs() < 1e-12);

        let trivial = Povm::new(
            vec![0.0],
            vec![crate::linalg::ComplexMatrix::identity(2)],
            &tol(),
        )
        .unwrap();
        let p = measurement_distribution(&rho, &trivial).unwrap();
        assert!((p.probabilities()[0] - 1.0).abs() < 1e-12);

        let half = crate::linalg::ComplexMatrix::identity(2).scale(crate::linalg::c64(0.5, 0.0));
        let split = Povm::new(vec![0.0, 1.0], vec![half.clone(), half], &tol()).unwrap();
        let p = measurement_distribution(&rho, &split).unwrap();
        assert!((p.probabilities()[0] - 0.5).abs() < 1e-12);
        assert!((p.probabilities()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn variational_witness_reaches_chi_squared_on_binary_outcomes() {
        let p = dist(&[0.0, 1.0], &[0.9, 0.1]);
        let q = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let (lhs, rhs) = chi2_variational_gap(&p, &q, &[0.0, 1.0]).unwrap();
        assert!((lhs - 0.64).abs() < 1e-12);
        assert!((rhs - 0.64).abs() < 1e-12);
        let (lhs, rhs) = chi2_variational_gap(&p, &p, &[0.0, 1.0]).unwrap();
        assert!(lhs == 0.0 && rhs == 0.0);
    }

    #[test]
    fn variational_witness_never_beats_chi_squared() {
        let mut rng = RngSeed::new(44, 0).rng();
        use rand::Rng;
        for _ in 0..100 {
            let pv: f64 = rng.random_range(0.05..0.95);
            let qv: f64 = rng.random_range(0.05..0.95);
            let p = dist(&[0.0, 1.0], &[pv, 1.0 - pv]);
            let q = dist(&[0.0, 1.0], &[qv, 1.0 - qv]);
            let g = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let (lhs, rhs) = chi2_variational_gap(&p, &q, &g).unwrap();
            assert!(lhs >= rhs - 1e-10, "lhs {lhs} < rhs {rhs}");
        }
    }

    #[test]
    fn constant_witness_with_shifted_means_is_degenerate() {
        let p = dist(&[0.0, 1.0], &[0.9, 0.1]);
        let q = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let out = chi2_variational_gap(&p, &q, &[2.0, 2.0]);
        assert!(matches!(out, Ok((_, rhs)) if rhs == 0.0));
        // A witness constant on supp(Q) but varying where only P has mass
        // shifts the means at zero variance.
        let q0 = dist(&[0.0, 1.0], &[1.0, 0.0]);
        let out = chi2_variational_gap(&p, &q0, &[0.0, 1.0]);
        assert!(matches!(out, Err(Error::DegenerateVariance { .. })));
    }

    #[test]
    fn renyi_divergences_are_additive_over_tensor_products() {
        let base = RngSeed::new(45, 0);
        for t in 0..5 {
            let rho = random_density(2, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t), &tol())
                .unwrap();
            let sigma =
                random_density(2, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t + 1), &tol())
                    .unwrap();
            let rho2 =
                validate_density(&tensor_product(rho.matrix(), rho.matrix()), &tol()).unwrap();
            let sigma2 =
                validate_density(&tensor_product(sigma.matrix(), sigma.matrix()), &tol()).unwrap();
            for alpha in [0.5, 2.0] {
                let single = petz_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                let double = petz_renyi(&rho2, &sigma2, alpha, &tol()).unwrap().value();
                assert!((double - 2.0 * single).abs() < 1e-8);
                let single = sandwiched_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                let double = sandwiched_renyi(&rho2, &sigma2, alpha, &tol()).unwrap().value();
                assert!((double - 2.0 * single).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn data_processing_contracts_second_order_divergence() {
        let base = RngSeed::new(46, 0);
        for t in 0..20 {
            let mut rng = base.with_stream(t).rng();
            let rho = random_density_from_stream(3, &mut rng);
            let sigma = random_density_from_stream(3, &mut rng);
            let povm = random_povm_from_stream(3, 4, &mut rng);
            let pr = measurement_distribution(&rho, &povm).unwrap();
            let ps = measurement_distribution(&sigma, &povm).unwrap();
            let quantum = petz_renyi(&rho, &sigma, 2.0, &tol()).unwrap().value();
            let classical = classical_renyi(&pr, &ps, 2.0).unwrap().value();
            assert!(quantum >= classical - 1e-9);
        }
    }

    fn random_density_from_stream(d: usize, rng: &mut rand_chacha::ChaCha12Rng) -> DensityMatrix {
        crate::linalg::random_density_from(d, &Ensemble::HilbertSchmidt, rng, &tol()).unwrap()
    }

    fn random_povm_from_stream(d: usize, k: usize, rng: &mut rand_chacha::ChaCha12Rng) -> Povm {
        crate::linalg::random_povm_from(d, k, rng, &tol()).unwrap()
    }

    #[test]
    fn unit_alpha_is_rejected() {
        let rho = diag(&[0.6, 0.4]);
        assert!(matches!(
            petz_renyi(&rho, &rho, 1.0, &tol()),
            Err(Error::AlphaOutOfDomain { .. })
        ));
        assert!(matches!(
            sandwiched_renyi(&rho, &rho, 1.0, &tol()),
            Err(Error::AlphaOutOfDomain { .. })
        ));
    }

    #[test]
    fn random_povm_draws_are_used_by_measurement() {
        let rho = random_density(3, &Ensemble::HilbertSchmidt, &RngSeed::new(47, 0), &tol())
            .unwrap();
        let povm = random_povm(3, 5, &RngSeed::new(47, 1), &tol()).unwrap();
        let p = measurement_distribution(&rho, &povm).unwrap();
        let total: f64 = p.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
