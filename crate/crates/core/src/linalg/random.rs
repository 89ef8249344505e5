//! Seeded sampling of unitaries, density operators, and POVMs.
//!
//! All randomness flows through ChaCha12 streams addressed by a
//! (seed, stream) pair, so any draw can be reproduced bit-for-bit
//! regardless of execution order or thread schedule. Campaigns assign one
//! stream per trial and make all of a trial's draws sequentially from it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::density::{validate_density, DensityMatrix, Povm, Spectrum, UnitaryMatrix};
use crate::linalg::eig::{hermitian_eig, reconstruct};
use crate::linalg::matrix::{c64, ComplexMatrix};
use crate::tolerance::ToleranceSet;

/// Counter-addressable RNG seed: `seed` selects the campaign, `stream` the
/// independent substream (typically a trial index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        Self {
            seed: self.seed,
            stream,
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Ensembles for random density matrices.
#[derive(Debug, Clone)]
pub enum Ensemble {
    /// G G^dag / Tr[G G^dag] with G a square complex Ginibre matrix.
    HilbertSchmidt,
    /// V diag(spectrum) V^dag with V Haar random.
    FixedSpectrum(Spectrum),
}

fn standard_complex(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// Square matrix of iid standard complex Gaussians.
fn ginibre(d: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let data = (0..d * d).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::from_row_major(d, d, data)
}

/// Haar-random unitary drawn from the given stream.
pub fn haar_unitary(d: usize, seed: &RngSeed) -> UnitaryMatrix {
    haar_unitary_from(d, &mut seed.rng())
}

/// Haar-random unitary consuming an existing stream.
///
/// QR of a Ginibre matrix, with each column of Q multiplied by the
/// conjugate phase of the matching diagonal entry of R. Fixing the phases
/// this way removes the gauge freedom of the QR factorization and makes
/// the resulting distribution exactly the Haar measure.
pub fn haar_unitary_from(d: usize, rng: &mut ChaCha12Rng) -> UnitaryMatrix {
    assert!(d >= 1, "dimension must be positive");
    let g = crate::linalg::eig::to_nalgebra(&ginibre(d, rng));
    let qr = g.qr();
    let r = qr.r();
    let mut u = crate::linalg::eig::from_nalgebra(&qr.q());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj.conj() / rjj.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(u, &ToleranceSet::default())
        .expect("QR orthonormalization yields a unitary matrix")
}

/// Random density matrix from the given ensemble and stream.
pub fn random_density(
    d: usize,
    ensemble: &Ensemble,
    seed: &RngSeed,
    tol: &ToleranceSet,
) -> Result<DensityMatrix> {
    random_density_from(d, ensemble, &mut seed.rng(), tol)
}

/// Random density matrix consuming an existing stream.
pub fn random_density_from(
    d: usize,
    ensemble: &Ensemble,
    rng: &mut ChaCha12Rng,
    tol: &ToleranceSet,
) -> Result<DensityMatrix> {
    match ensemble {
        Ensemble::HilbertSchmidt => {
            let g = ginibre(d, rng);
            let w = g.matmul(&g.dagger());
            let trace = w.trace().re;
            validate_density(&w.scale(c64(1.0 / trace, 0.0)), tol)
        }
        Ensemble::FixedSpectrum(spectrum) => {
            if spectrum.len() != d {
                return Err(Error::InvalidSpectrum {
                    detail: format!("spectrum has {} entries for dimension {d}", spectrum.len()),
                });
            }
            let v = haar_unitary_from(d, rng);
            validate_density(&reconstruct(&v, spectrum.values()), tol)
        }
    }
}

/// Random POVM with k outcomes: Wishart elements conjugated by the inverse
/// square root of their sum, labels 0..k-1.
pub fn random_povm(d: usize, k: usize, seed: &RngSeed, tol: &ToleranceSet) -> Result<Povm> {
    random_povm_from(d, k, &mut seed.rng(), tol)
}

/// Random POVM consuming an existing stream.
pub fn random_povm_from(
    d: usize,
    k: usize,
    rng: &mut ChaCha12Rng,
    tol: &ToleranceSet,
) -> Result<Povm> {
    assert!(k >= 2, "a POVM needs at least two outcomes");
    let parts: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(d, rng);
            g.matmul(&g.dagger())
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &parts {
        sum = sum.add(p);
    }
    let eig = hermitian_eig(&sum, tol)?;
    let max = eig.values()[0];
    let min = *eig.values().last().unwrap();
    if min <= 1e-12 * max {
        return Err(Error::SingularNormalizer {
            min_eigenvalue: min,
        });
    }
    let inv_sqrt_values: Vec<f64> = eig.values().iter().map(|v| 1.0 / v.sqrt()).collect();
    let inv_sqrt = reconstruct(eig.vectors(), &inv_sqrt_values);
    let elements: Vec<ComplexMatrix> = parts
        .iter()
        .map(|p| inv_sqrt.matmul(p).matmul(&inv_sqrt))
        .collect();
    Povm::new((0..k).map(|j| j as f64).collect(), elements, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    #[test]
    fn haar_unitary_is_unitary() {
        for d in [1, 2, 3, 5] {
            let u = haar_unitary(d, &RngSeed::new(3, 1));
            assert!(u.matrix().unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn haar_scalar_has_unit_modulus() {
        let u = haar_unitary(1, &RngSeed::new(9, 0));
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identical_seeds_reproduce_identical_draws() {
        let a = haar_unitary(2, &RngSeed::new(7, 0));
        let b = haar_unitary(2, &RngSeed::new(7, 0));
        assert_eq!(a.matrix(), b.matrix());
        let c = haar_unitary(2, &RngSeed::new(7, 1));
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn haar_first_entry_moment_matches_one_over_d() {
        // E|U_00|^2 = 1/d under Haar; |U_00|^2 is Beta(1, d-1) distributed,
        // so 10^4 draws pin the mean within five standard errors.
        for d in [2usize, 3] {
            let n = 10_000;
            let mut rng = RngSeed::new(21, 0).rng();
            let mut acc = 0.0;
            for _ in 0..n {
                let u = haar_unitary_from(d, &mut rng);
                acc += u.matrix()[(0, 0)].norm_sqr();
            }
            let mean = acc / n as f64;
            let df = d as f64;
            let var = (df - 1.0) / (df * df * (df + 1.0));
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - 1.0 / df).abs() < 5.0 * se,
                "d={d}: mean {mean} vs {}",
                1.0 / df
            );
        }
    }

    #[test]
    fn hilbert_schmidt_draw_is_a_valid_state() {
        let rho = random_density(2, &Ensemble::HilbertSchmidt, &RngSeed::new(5, 2), &tol());
        assert!(rho.is_ok());
    }

    #[test]
    fn fixed_spectrum_is_preserved_under_conjugation() {
        let spec = Spectrum::new(vec![1.0, 0.0], &tol()).unwrap();
        let rho = random_density(
            2,
            &Ensemble::FixedSpectrum(spec),
            &RngSeed::new(8, 0),
            &tol(),
        )
        .unwrap();
        let values = rho.spectrum(&tol()).unwrap().descending();
        assert!((values[0] - 1.0).abs() < 1e-10);
        assert!(values[1].abs() < 1e-10);
    }

    #[test]
    fn fixed_spectrum_round_trips_through_eigendecomposition() {
        let spec = Spectrum::new(vec![0.6, 0.4], &tol()).unwrap();
        let rho = random_density(
            2,
            &Ensemble::FixedSpectrum(spec),
            &RngSeed::new(3, 0),
            &tol(),
        )
        .unwrap();
        let values = rho.spectrum(&tol()).unwrap().descending();
        assert!((values[0] - 0.6).abs() < 1e-10);
        assert!((values[1] - 0.4).abs() < 1e-10);
    }

    #[test]
    fn random_povm_is_complete_and_positive() {
        for k in [2usize, 4] {
            let povm = random_povm(3, k, &RngSeed::new(17, k as u64), &tol()).unwrap();
            assert_eq!(povm.len(), k);
            let mut sum = ComplexMatrix::zeros(3, 3);
            for e in povm.elements() {
                sum = sum.add(e);
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
        }
    }
}
