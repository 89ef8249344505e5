//! Validated operator types: density matrices, unitaries, spectra, POVMs.
//!
//! Constructors check the defining invariants against a tolerance set and
//! refuse anything outside it, so downstream code can assume well-formed
//! inputs without re-checking.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eig::{hermitian_eig, EigDecomposition};
use crate::linalg::matrix::ComplexMatrix;
use crate::tolerance::ToleranceSet;

/// Hermitian, positive semidefinite, unit-trace operator.
///
/// The stored matrix is the symmetrized input (M + M^dag)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Diagonal state from a probability vector.
    pub fn from_diag(probs: &[f64], tol: &ToleranceSet) -> Result<Self> {
        validate_density(&ComplexMatrix::from_real_diag(probs), tol)
    }

    pub fn eig(&self, tol: &ToleranceSet) -> Result<EigDecomposition> {
        hermitian_eig(&self.matrix, tol)
    }

    /// Eigenvalue spectrum as a probability vector (descending order).
    pub fn spectrum(&self, tol: &ToleranceSet) -> Result<Spectrum> {
        Spectrum::new(self.eig(tol)?.values().to_vec(), tol)
    }
}

/// Validates and symmetrizes a candidate density matrix.
pub fn validate_density(m: &ComplexMatrix, tol: &ToleranceSet) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            actual: m.cols(),
        });
    }
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian {
            residual,
            tol: tol.hermiticity,
        });
    }
    let sym = m.symmetrized();
    let trace = sym.trace();
    let trace_residual = (trace - Complex64::ONE).norm();
    if trace_residual > tol.trace {
        return Err(Error::TraceNotOne {
            trace: trace.re,
            residual: trace_residual,
            tol: tol.trace,
        });
    }
    let eig = hermitian_eig(&sym, tol)?;
    let min = *eig
        .values()
        .last()
        .expect("density matrix has at least one eigenvalue");
    if min < -tol.psd {
        return Err(Error::NotPositive {
            eigenvalue: min,
            tol: tol.psd,
        });
    }
    Ok(DensityMatrix { matrix: sym })
}

/// Matrix with U^dag U = I within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix, tol: &ToleranceSet) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                actual: matrix.cols(),
            });
        }
        let residual = matrix.unitarity_residual();
        if residual > tol.unitarity {
            return Err(Error::NotUnitary {
                residual,
                tol: tol.unitarity,
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// U M U^dag.
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.matmul(m).matmul(&self.matrix.dagger())
    }
}

/// Sort order detected on a spectrum's stored values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumOrder {
    Ascending,
    Descending,
    Unsorted,
}

/// Probability spectrum: eigenvalues of a density operator.
///
/// Values are clipped to [0, 1] on construction; entries outside
/// [-psd_tol, 1 + trace_tol] or a total away from 1 are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    order: SpectrumOrder,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, tol: &ToleranceSet) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum {
                detail: "spectrum is empty".into(),
            });
        }
        let mut clipped = Vec::with_capacity(values.len());
        for &v in &values {
            if !v.is_finite() || v < -tol.psd || v > 1.0 + tol.trace {
                return Err(Error::InvalidSpectrum {
                    detail: format!("entry {v:e} outside [0, 1]"),
                });
            }
            clipped.push(v.clamp(0.0, 1.0));
        }
        let sum: f64 = clipped.iter().sum();
        if (sum - 1.0).abs() > values.len() as f64 * tol.trace {
            return Err(Error::InvalidSpectrum {
                detail: format!("spectrum sum {sum:.17} differs from 1"),
            });
        }
        let order = detect_order(&clipped);
        Ok(Self {
            values: clipped,
            order,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> SpectrumOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ascending(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn descending(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }
}

fn detect_order(values: &[f64]) -> SpectrumOrder {
    let asc = values.windows(2).all(|w| w[0] <= w[1]);
    let desc = values.windows(2).all(|w| w[0] >= w[1]);
    match (asc, desc) {
        (true, _) => SpectrumOrder::Ascending,
        (_, true) => SpectrumOrder::Descending,
        _ => SpectrumOrder::Unsorted,
    }
}

/// Positive operator-valued measure: outcome labels with PSD elements that
/// sum to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    outcomes: Vec<f64>,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(outcomes: Vec<f64>, elements: Vec<ComplexMatrix>, tol: &ToleranceSet) -> Result<Self> {
        if outcomes.len() != elements.len() || elements.is_empty() {
            return Err(Error::InvalidPovm {
                detail: format!(
                    "{} outcome labels for {} elements",
                    outcomes.len(),
                    elements.len()
                ),
            });
        }
        for (i, a) in outcomes.iter().enumerate() {
            if outcomes[i + 1..].contains(a) {
                return Err(Error::InvalidPovm {
                    detail: format!("duplicate outcome label {a}"),
                });
            }
        }
        let d = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &elements {
            if !e.is_square() || e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: e.rows(),
                });
            }
            let eig = hermitian_eig(e, tol)?;
            let min = *eig.values().last().unwrap();
            if min < -tol.psd {
                return Err(Error::NotPositive {
                    eigenvalue: min,
                    tol: tol.psd,
                });
            }
            sum = sum.add(e);
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if completeness > tol.unitarity {
            return Err(Error::InvalidPovm {
                detail: format!("elements sum to identity only within {completeness:.3e}"),
            });
        }
        Ok(Self { outcomes, elements })
    }

    /// Projective measurement onto the computational basis, labels 0..d-1.
    pub fn computational(d: usize) -> Self {
        let mut elements = Vec::with_capacity(d);
        for k in 0..d {
            let mut diag = vec![0.0; d];
            diag[k] = 1.0;
            elements.push(ComplexMatrix::from_real_diag(&diag));
        }
        Self {
            outcomes: (0..d).map(|k| k as f64).collect(),
            elements,
        }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::c64;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    #[test]
    fn diagonal_probability_matrix_validates() {
        assert!(DensityMatrix::from_diag(&[0.6, 0.4], &tol()).is_ok());
    }

    #[test]
    fn trace_violation_is_named() {
        let r = DensityMatrix::from_diag(&[0.6, 0.5], &tol());
        assert!(matches!(r, Err(Error::TraceNotOne { .. })));
    }

    #[test]
    fn negative_eigenvalue_is_named() {
        let r = DensityMatrix::from_diag(&[1.2, -0.2], &tol());
        assert!(matches!(r, Err(Error::NotPositive { .. })));
    }

    #[test]
    fn validation_symmetrizes_before_checks() {
        // Asymmetry within tolerance is averaged away.
        let mut m = ComplexMatrix::from_real_diag(&[0.6, 0.4]);
        m[(0, 1)] = c64(0.1, 5e-11);
        m[(1, 0)] = c64(0.1, -5.00002e-11);
        let rho = validate_density(&m, &tol()).unwrap();
        assert!(rho.matrix().hermiticity_residual() < 1e-16);
    }

    #[test]
    fn spectrum_clips_round_off_and_sorts() {
        let s = Spectrum::new(vec![1.0 + 5e-11, -5e-11], &tol()).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0]);
        assert_eq!(s.order(), SpectrumOrder::Descending);
        assert_eq!(s.ascending(), vec![0.0, 1.0]);
    }

    #[test]
    fn spectrum_rejects_bad_total() {
        assert!(matches!(
            Spectrum::new(vec![0.6, 0.5], &tol()),
            Err(Error::InvalidSpectrum { .. })
        ));
    }

    #[test]
    fn projective_basis_is_a_valid_povm() {
        let p = Povm::new(
            vec![0.0, 1.0],
            vec![
                ComplexMatrix::from_real_diag(&[1.0, 0.0]),
                ComplexMatrix::from_real_diag(&[0.0, 1.0]),
            ],
            &tol(),
        );
        assert!(p.is_ok());
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let p = Povm::new(
            vec![0.0, 1.0],
            vec![
                ComplexMatrix::from_real_diag(&[1.0, 0.0]),
                ComplexMatrix::from_real_diag(&[0.0, 0.5]),
            ],
            &tol(),
        );
        assert!(matches!(p, Err(Error::InvalidPovm { .. })));
    }
}
