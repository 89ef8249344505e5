//! The computable right-hand sides: joint spectrum, block partial sums,
//! optimal reachable spectrum, the divergence and Bures-angle bounds, the
//! TUR-style measurement bound, the estimator bounds, and the extremal
//! unitary that saturates them.
//!
//! Everything here depends on the initial states only through their
//! spectra, which is the point: the bounds hold for every joint unitary.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::divergence::check_alpha;
use crate::error::Result;
use crate::linalg::{
    tensor_product, ComplexMatrix, DensityMatrix, Spectrum, UnitaryMatrix,
};
use crate::majorization::{log_pairing, pairing_sum};
use crate::tolerance::ToleranceSet;

/// Descending products of system and environment eigenvalues.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    values: Vec<f64>,
    d_s: usize,
    d_e: usize,
}

impl JointSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All pairwise eigenvalue products, sorted descending.
pub fn joint_spectrum(lambda_s: &Spectrum, lambda_e: &Spectrum) -> JointSpectrum {
    let mut values: Vec<f64> = lambda_s
        .values()
        .iter()
        .flat_map(|s| lambda_e.values().iter().map(move |e| s * e))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    JointSpectrum {
        values,
        d_s: lambda_s.len(),
        d_e: lambda_e.len(),
    }
}

/// Block partial sums C_k = sum of the top k*d_E joint eigenvalues, for
/// k = 1..d_S. C_0 = 0 is implicit.
pub fn block_sums(joint: &JointSpectrum) -> Vec<f64> {
    let mut sums = Vec::with_capacity(joint.d_s);
    let mut acc = 0.0;
    for (n, v) in joint.values.iter().enumerate() {
        acc += v;
        if (n + 1) % joint.d_e == 0 {
            sums.push(acc);
        }
    }
    sums
}

/// Eigenvalues of the optimal post-dynamics state: successive differences
/// of the block sums, nonincreasing by construction.
pub fn optimal_spectrum(c_sums: &[f64], tol: &ToleranceSet) -> Result<Spectrum> {
    let mut diffs = Vec::with_capacity(c_sums.len());
    let mut prev = 0.0;
    for &c in c_sums {
        diffs.push(c - prev);
        prev = c;
    }
    Spectrum::new(diffs, tol)
}

/// Anti-aligned pairing bound on the Petz divergence between states with
/// the given spectra, valid for any two states realizing them.
pub fn eigen_divergence_bound(
    lambda_rho: &Spectrum,
    lambda_sigma: &Spectrum,
    alpha: f64,
) -> Result<f64> {
    Ok(log_pairing(
        pairing_sum(lambda_rho.values(), lambda_sigma.values(), alpha)?,
        alpha,
    ))
}

fn optimal_from_initial(
    lambda_s: &Spectrum,
    lambda_e: &Spectrum,
    tol: &ToleranceSet,
) -> Result<Spectrum> {
    optimal_spectrum(&block_sums(&joint_spectrum(lambda_s, lambda_e)), tol)
}

/// Reachability bound on D_alpha(rho_S || sigma_S) over all joint
/// unitaries, from the initial spectra alone.
pub fn divergence_bound(
    lambda_s: &Spectrum,
    lambda_e: &Spectrum,
    alpha: f64,
    tol: &ToleranceSet,
) -> Result<f64> {
    check_alpha(alpha)?;
    let optimal = optimal_from_initial(lambda_s, lambda_e, tol)?;
    eigen_divergence_bound(lambda_s, &optimal, alpha)
}

/// Reachability bound on the Bures angle: arccos of the fidelity-root
/// pairing, argument clipped against round-off.
pub fn bures_bound(lambda_s: &Spectrum, lambda_e: &Spectrum, tol: &ToleranceSet) -> Result<f64> {
    let optimal = optimal_from_initial(lambda_s, lambda_e, tol)?;
    let root = pairing_sum(lambda_s.values(), optimal.values(), 0.5)?;
    Ok(root.clamp(0.0, 1.0).acos())
}

/// S = sum_n lam_n_up(rho_S)^2 / delta C_n, the anti-aligned second-order
/// pairing. Computed with plain squares so the R = 1 estimator bound and
/// the TUR bound agree bit for bit.
fn inverse_ratio_sum(lambda_s: &Spectrum, optimal: &Spectrum) -> f64 {
    let lams = lambda_s.ascending();
    let deltas = optimal.descending();
    let mut sum = 0.0;
    for (&l, &c) in lams.iter().zip(deltas.iter()) {
        if l <= 0.0 {
            continue;
        }
        if c <= 0.0 {
            return f64::INFINITY;
        }
        sum += l * l / c;
    }
    sum
}

/// Lower bound on the relative variance of any measurement that tells
/// sigma_S from rho_S: [S - 1]^(-1). Infinite when no spectral motion is
/// possible, zero when S diverges.
pub fn tur_bound(lambda_s: &Spectrum, lambda_e: &Spectrum, tol: &ToleranceSet) -> Result<f64> {
    estimator_bound(lambda_s, lambda_e, 1, tol)
}

/// Lower bound on the relative variance (or MSE) of an estimator built on
/// R independent repetitions: [S^R - 1]^(-1).
pub fn estimator_bound(
    lambda_s: &Spectrum,
    lambda_e: &Spectrum,
    r: u32,
    tol: &ToleranceSet,
) -> Result<f64> {
    assert!(r >= 1, "repetition count must be positive");
    let optimal = optimal_from_initial(lambda_s, lambda_e, tol)?;
    let s = inverse_ratio_sum(lambda_s, &optimal);
    if s.is_infinite() {
        return Ok(0.0);
    }
    let bracket = if r == 1 { s - 1.0 } else { s.powi(r as i32) - 1.0 };
    if bracket <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / bracket)
}

/// Everything the CLI reports for one (lambda_S, lambda_E, alpha) cell.
#[derive(Debug, Clone, Serialize)]
pub struct BoundSet {
    pub c_sums: Vec<f64>,
    pub optimal_spectrum: Vec<f64>,
    pub alpha: f64,
    pub divergence_bound: f64,
    pub bures_bound: f64,
    pub tur_bound: f64,
    pub estimator_bounds: BTreeMap<u32, f64>,
}

pub fn bound_set(
    lambda_s: &Spectrum,
    lambda_e: &Spectrum,
    alpha: f64,
    r_values: &[u32],
    tol: &ToleranceSet,
) -> Result<BoundSet> {
    let c_sums = block_sums(&joint_spectrum(lambda_s, lambda_e));
    let optimal = optimal_spectrum(&c_sums, tol)?;
    let divergence = eigen_divergence_bound(lambda_s, &optimal, alpha)?;
    let bures = bures_bound(lambda_s, lambda_e, tol)?;
    let tur = tur_bound(lambda_s, lambda_e, tol)?;
    let mut estimator_bounds = BTreeMap::new();
    for &r in r_values {
        estimator_bounds.insert(r, estimator_bound(lambda_s, lambda_e, r, tol)?);
    }
    Ok(BoundSet {
        c_sums,
        optimal_spectrum: optimal.descending(),
        alpha,
        divergence_bound: divergence,
        bures_bound: bures,
        tur_bound: tur,
        estimator_bounds,
    })
}

/// Builds the permutation matrix sending basis vector `sources[n]` to
/// computational position n.
fn permutation_matrix(sources: &[usize]) -> ComplexMatrix {
    let d = sources.len();
    let mut p = ComplexMatrix::zeros(d, d);
    for (n, &l) in sources.iter().enumerate() {
        p[(n, l)] = crate::linalg::c64(1.0, 0.0);
    }
    p
}

/// The joint unitary saturating the reachability bounds.
///
/// U = (W_S x I) P (V_S x V_E)^dag: rotate into the joint eigenbasis, sort
/// the joint eigenvalues down the computational diagonal so the partial
/// trace yields the optimal spectrum in blocks, then rotate the k-th block
/// weight onto the eigenvector of the k-th smallest eigenvalue of rho_S.
/// The output state commutes with rho_S and pairs large against small,
/// which is exactly the pairing the bounds evaluate.
pub fn extremal_unitary(
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    tol: &ToleranceSet,
) -> Result<UnitaryMatrix> {
    let d_s = rho_s.dim();
    let d_e = rho_e.dim();
    let es = rho_s.eig(tol)?;
    let ee = rho_e.eig(tol)?;
    let products: Vec<f64> = es
        .values()
        .iter()
        .flat_map(|a| ee.values().iter().map(move |b| a * b))
        .collect();
    let mut order: Vec<usize> = (0..products.len()).collect();
    order.sort_by(|&x, &y| products[y].total_cmp(&products[x]).then(x.cmp(&y)));
    let p = permutation_matrix(&order);
    // Reversal permutation: block k lands on the eigenvector of the k-th
    // ascending eigenvalue of rho_S.
    let reversal: Vec<usize> = (0..d_s).rev().collect();
    let w_s = es.vectors().matrix().matmul(&permutation_matrix(&reversal));
    let w = tensor_product(&w_s, &ComplexMatrix::identity(d_e));
    let basis = tensor_product(es.vectors().matrix(), ee.vectors().matrix());
    let u = w.matmul(&p).matmul(&basis.dagger());
    UnitaryMatrix::new(u, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{bures_angle, petz_renyi};
    use crate::linalg::{
        partial_trace_env, random_density, validate_density, Ensemble, RngSeed,
    };

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), &tol()).unwrap()
    }

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() < tol,
            "{actual} vs {expected} beyond {tol}"
        );
    }

    #[test]
    fn joint_spectrum_sorts_products() {
        let j = joint_spectrum(&spec(&[0.6, 0.4]), &spec(&[0.9, 0.1]));
        let expected = [0.54, 0.36, 0.06, 0.04];
        for (v, e) in j.values().iter().zip(expected.iter()) {
            assert_close(*v, *e, 1e-12);
        }
        let trivial = joint_spectrum(&spec(&[0.4, 0.6]), &spec(&[1.0]));
        assert_close(trivial.values()[0], 0.6, 1e-15);
        assert_close(trivial.values()[1], 0.4, 1e-15);
        let uniform = joint_spectrum(&spec(&[0.5, 0.5]), &spec(&[0.5, 0.5]));
        for v in uniform.values() {
            assert_close(*v, 0.25, 1e-15);
        }
    }

    #[test]
    fn block_sums_accumulate_in_environment_strides() {
        let j = joint_spectrum(&spec(&[0.6, 0.4]), &spec(&[0.9, 0.1]));
        let c = block_sums(&j);
        assert_close(c[0], 0.90, 1e-12);
        assert_close(c[1], 1.00, 1e-12);
        let j = joint_spectrum(&spec(&[0.7, 0.3]), &spec(&[1.0, 0.0]));
        let c = block_sums(&j);
        assert_close(c[0], 1.0, 1e-12);
        assert_close(c[1], 1.0, 1e-12);
        let j = joint_spectrum(&spec(&[0.5, 0.5]), &spec(&[0.5, 0.5]));
        let c = block_sums(&j);
        assert_close(c[0], 0.5, 1e-12);
        assert_close(c[1], 1.0, 1e-12);
    }

    #[test]
    fn optimal_spectrum_takes_differences() {
        let o = optimal_spectrum(&[0.90, 1.00], &tol()).unwrap();
        assert_close(o.descending()[0], 0.90, 1e-12);
        assert_close(o.descending()[1], 0.10, 1e-12);
        let o = optimal_spectrum(&[1.0, 1.0], &tol()).unwrap();
        assert_close(o.descending()[0], 1.0, 1e-12);
        assert_close(o.descending()[1], 0.0, 1e-12);
        let o = optimal_spectrum(&[0.5, 1.0], &tol()).unwrap();
        assert_close(o.descending()[0], 0.5, 1e-12);
    }

    #[test]
    fn divergence_bound_worked_values() {
        let ls = spec(&[0.6, 0.4]);
        let le = spec(&[0.9, 0.1]);
        let b2 = divergence_bound(&ls, &le, 2.0, &tol()).unwrap();
        assert_close(b2, (0.16f64 / 0.9 + 0.36 / 0.1).ln(), 1e-12);
        assert_close(b2, 1.329136, 1e-6);
        let bh = divergence_bound(&ls, &le, 0.5, &tol()).unwrap();
        assert_close(bh, -2.0 * (0.36f64.sqrt() + 0.06f64.sqrt()).ln(), 1e-12);
        assert_close(bh, 0.336958, 1e-6);
        let uniform = spec(&[0.5, 0.5]);
        for alpha in [0.5, 2.0, 3.0] {
            let b = divergence_bound(&uniform, &uniform, alpha, &tol()).unwrap();
            assert!(b.abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_bound_is_the_pairing_of_the_optimal_spectrum() {
        let ls = spec(&[0.5, 0.3, 0.2]);
        let le = spec(&[0.8, 0.15, 0.05]);
        for alpha in [0.5, 0.9, 1.5, 2.0] {
            let direct = divergence_bound(&ls, &le, alpha, &tol()).unwrap();
            let optimal =
                optimal_spectrum(&block_sums(&joint_spectrum(&ls, &le)), &tol()).unwrap();
            let chained = eigen_divergence_bound(&ls, &optimal, alpha).unwrap();
            assert!(direct == chained, "alpha {alpha}: {direct} vs {chained}");
        }
    }

    #[test]
    fn trivial_environment_reduces_to_unitary_orbit_bound() {
        let ls = spec(&[0.5, 0.3, 0.2]);
        let le = spec(&[1.0]);
        for alpha in [0.5, 2.0] {
            let through_env = divergence_bound(&ls, &le, alpha, &tol()).unwrap();
            let orbit = eigen_divergence_bound(&ls, &ls, alpha).unwrap();
            assert_close(through_env, orbit, 1e-12);
        }
    }

    #[test]
    fn bures_bound_worked_values() {
        let b = bures_bound(&spec(&[0.6, 0.4]), &spec(&[0.9, 0.1]), &tol()).unwrap();
        assert_close(b, 0.844949f64.acos(), 1e-6);
        assert_close(b, 0.5644, 1e-4);
        let b = bures_bound(&spec(&[0.5, 0.5]), &spec(&[0.5, 0.5]), &tol()).unwrap();
        assert!(b.abs() < 1e-7);
        let b = bures_bound(&spec(&[0.7, 0.3]), &spec(&[1.0, 0.0]), &tol()).unwrap();
        assert_close(b, 0.3f64.sqrt().acos(), 1e-12);
        assert_close(b, 0.9912, 1e-4);
    }

    #[test]
    fn tur_bound_worked_values() {
        let t = tur_bound(&spec(&[0.6, 0.4]), &spec(&[0.9, 0.1]), &tol()).unwrap();
        assert_close(t, 0.36, 1e-12);
        let t = tur_bound(&spec(&[0.5, 0.5]), &spec(&[0.5, 0.5]), &tol()).unwrap();
        assert!(t.is_infinite());
        let t = tur_bound(&spec(&[0.7, 0.3]), &spec(&[1.0, 0.0]), &tol()).unwrap();
        assert!(t == 0.0);
    }

    #[test]
    fn estimator_bound_worked_values() {
        let ls = spec(&[0.6, 0.4]);
        let le = spec(&[0.9, 0.1]);
        let r1 = estimator_bound(&ls, &le, 1, &tol()).unwrap();
        let t = tur_bound(&ls, &le, &tol()).unwrap();
        assert!(r1 == t, "R = 1 must reproduce the TUR bound exactly");
        let r2 = estimator_bound(&ls, &le, 2, &tol()).unwrap();
        assert_close(r2, 81.0 / 1075.0, 1e-12);
        assert_close(r2, 0.0753489, 1e-6);
        let r4 = estimator_bound(&ls, &le, 4, &tol()).unwrap();
        assert_close(r4, 6561.0 / 1329775.0, 1e-12);
        assert_close(r4, 0.0049337, 3e-7);
    }

    #[test]
    fn estimator_bounds_decrease_in_repetitions() {
        let ls = spec(&[0.6, 0.4]);
        let le = spec(&[0.9, 0.1]);
        let mut prev = f64::INFINITY;
        for r in 1..=6 {
            let b = estimator_bound(&ls, &le, r, &tol()).unwrap();
            assert!(b < prev, "R {r}: {b} not below {prev}");
            prev = b;
        }
    }

    #[test]
    fn eigen_bound_worked_values() {
        let b = eigen_divergence_bound(&spec(&[0.9, 0.1]), &spec(&[0.9, 0.1]), 2.0).unwrap();
        assert_close(b, (0.01f64 / 0.9 + 0.81 / 0.1).ln(), 1e-12);
        assert_close(b, 2.093235, 1e-6);
        let b = eigen_divergence_bound(&spec(&[1.0]), &spec(&[1.0]), 2.0).unwrap();
        assert!(b.abs() < 1e-12);
    }

    #[test]
    fn eigen_bound_dominates_petz_on_fixed_spectra() {
        let base = RngSeed::new(51, 0);
        let lr = spec(&[0.5, 0.3, 0.2]);
        let lsig = spec(&[0.7, 0.2, 0.1]);
        for t in 0..20 {
            let rho = random_density(
                3,
                &Ensemble::FixedSpectrum(lr.clone()),
                &base.with_stream(2 * t),
                &tol(),
            )
            .unwrap();
            let sigma = random_density(
                3,
                &Ensemble::FixedSpectrum(lsig.clone()),
                &base.with_stream(2 * t + 1),
                &tol(),
            )
            .unwrap();
            for alpha in [0.5, 1.5, 2.0] {
                let bound = eigen_divergence_bound(&lr, &lsig, alpha).unwrap();
                let d = petz_renyi(&rho, &sigma, alpha, &tol()).unwrap().value();
                assert!(bound >= d - 1e-9, "alpha {alpha}: bound {bound} < petz {d}");
            }
        }
    }

    #[test]
    fn bound_set_collects_consistent_fields() {
        let ls = spec(&[0.6, 0.4]);
        let le = spec(&[0.9, 0.1]);
        let set = bound_set(&ls, &le, 2.0, &[1, 2, 4], &tol()).unwrap();
        assert_close(set.c_sums[1], 1.0, 1e-12);
        assert_close(set.optimal_spectrum[0], 0.9, 1e-12);
        assert_close(set.divergence_bound, (0.16f64 / 0.9 + 0.36 / 0.1).ln(), 1e-12);
        assert!(set.estimator_bounds[&1] == set.tur_bound);
        assert!(set.estimator_bounds[&2] < set.estimator_bounds[&1]);
        assert!(set.estimator_bounds[&4] < set.estimator_bounds[&2]);
    }

    fn evolve_reduced(
        u: &UnitaryMatrix,
        rho_s: &DensityMatrix,
        rho_e: &DensityMatrix,
    ) -> DensityMatrix {
        let joint = tensor_product(rho_s.matrix(), rho_e.matrix());
        let evolved = u.conjugate(&joint);
        let reduced = partial_trace_env(&evolved, rho_s.dim(), rho_e.dim()).unwrap();
        validate_density(&reduced, &tol()).unwrap()
    }

    #[test]
    fn extremal_unitary_saturates_worked_example() {
        let rho_s = DensityMatrix::from_diag(&[0.6, 0.4], &tol()).unwrap();
        let rho_e = DensityMatrix::from_diag(&[0.9, 0.1], &tol()).unwrap();
        let u = extremal_unitary(&rho_s, &rho_e, &tol()).unwrap();
        let sigma = evolve_reduced(&u, &rho_s, &rho_e);
        let values = sigma.spectrum(&tol()).unwrap().descending();
        assert_close(values[0], 0.9, 1e-9);
        assert_close(values[1], 0.1, 1e-9);
        let commutator = rho_s
            .matrix()
            .matmul(sigma.matrix())
            .sub(&sigma.matrix().matmul(rho_s.matrix()));
        assert!(commutator.max_abs() < 1e-9);
        let d2 = petz_renyi(&rho_s, &sigma, 2.0, &tol()).unwrap().value();
        assert_close(d2, (0.16f64 / 0.9 + 0.36 / 0.1).ln(), 1e-8);
    }

    #[test]
    fn extremal_unitary_fixes_the_maximally_mixed_state() {
        let mixed = DensityMatrix::from_diag(&[0.5, 0.5], &tol()).unwrap();
        let u = extremal_unitary(&mixed, &mixed, &tol()).unwrap();
        let sigma = evolve_reduced(&u, &mixed, &mixed);
        assert!(sigma.matrix().max_abs_diff(mixed.matrix()) < 1e-10);
    }

    #[test]
    fn extremal_unitary_purifies_against_pure_environment() {
        let rho_s = DensityMatrix::from_diag(&[0.7, 0.3], &tol()).unwrap();
        let rho_e = DensityMatrix::from_diag(&[1.0, 0.0], &tol()).unwrap();
        let u = extremal_unitary(&rho_s, &rho_e, &tol()).unwrap();
        let sigma = evolve_reduced(&u, &rho_s, &rho_e);
        let top = sigma.spectrum(&tol()).unwrap().descending()[0];
        assert_close(top, 1.0, 1e-9);
        let angle = bures_angle(&rho_s, &sigma, &tol()).unwrap();
        assert_close(angle, 0.3f64.sqrt().acos(), 1e-8);
    }

    #[test]
    fn extremal_unitary_saturates_on_random_states() {
        let base = RngSeed::new(52, 0);
        for t in 0..10 {
            let rho_s =
                random_density(3, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t), &tol())
                    .unwrap();
            let rho_e =
                random_density(2, &Ensemble::HilbertSchmidt, &base.with_stream(2 * t + 1), &tol())
                    .unwrap();
            let ls = rho_s.spectrum(&tol()).unwrap();
            let le = rho_e.spectrum(&tol()).unwrap();
            let u = extremal_unitary(&rho_s, &rho_e, &tol()).unwrap();
            let sigma = evolve_reduced(&u, &rho_s, &rho_e);
            let optimal =
                optimal_spectrum(&block_sums(&joint_spectrum(&ls, &le)), &tol()).unwrap();
            let achieved = sigma.spectrum(&tol()).unwrap().descending();
            for (a, b) in achieved.iter().zip(optimal.descending().iter()) {
                assert_close(*a, *b, 1e-9);
            }
            for alpha in [0.5, 0.9, 1.5, 2.0] {
                let bound = divergence_bound(&ls, &le, alpha, &tol()).unwrap();
                let d = petz_renyi(&rho_s, &sigma, alpha, &tol()).unwrap().value();
                assert!(
                    (d - bound).abs() < 1e-8,
                    "alpha {alpha}: divergence {d} vs bound {bound}"
                );
            }
        }
    }
}
