//! Hermitian eigendecomposition and spectral matrix functions.
//!
//! Decompositions are delegated to nalgebra's symmetric (tridiagonal QL)
//! solver; this module adds the validation, deterministic ordering, and
//! support conventions the rest of the crate relies on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::density::UnitaryMatrix;
use crate::linalg::matrix::{c64, ComplexMatrix};
use crate::tolerance::{ToleranceSet, SUPPORT_THRESHOLD};

const EIG_EPS: f64 = 1e-14;
const EIG_MAX_ITER: usize = 10_000;

/// Eigendecomposition of a Hermitian matrix: M = V diag(values) V^dag with
/// real eigenvalues sorted descending and eigenvectors as the columns of a
/// unitary matrix, in matching order.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    values: Vec<f64>,
    vectors: UnitaryMatrix,
}

impl EigDecomposition {
    /// Eigenvalues in descending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvalues in ascending order.
    pub fn values_ascending(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.reverse();
        v
    }

    /// Unitary whose k-th column is the eigenvector for `values()[k]`.
    pub fn vectors(&self) -> &UnitaryMatrix {
        &self.vectors
    }
}

pub(crate) fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// Decomposes a Hermitian matrix. The input is symmetrized as
/// (M + M^dag)/2 before factorization so that round-off asymmetry cannot
/// leak into the eigenvectors; inputs beyond the hermiticity tolerance are
/// rejected. Ties in the descending value sort are broken by ascending
/// original solver index, which makes the ordering deterministic.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &ToleranceSet) -> Result<EigDecomposition> {
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
    let d = m.dim();
    let sym = to_nalgebra(&m.symmetrized());
    let eig = sym
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::ConvergenceFailure {
            max_iter: EIG_MAX_ITER,
        })?;

    let mut order: Vec<usize> = (0..d).collect();
    // Stable sort: equal eigenvalues keep their solver order.
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..d {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    let vectors = UnitaryMatrix::new(vectors, tol)?;
    Ok(EigDecomposition { values, vectors })
}

/// Spectral power M^p of a PSD matrix.
///
/// Eigenvalues in [-psd_tol, 0) are clipped to zero; anything more negative
/// is rejected. Conventions: 0^p = 0 for p > 0, and for p <= 0 the power is
/// taken on the support subspace only (eigenvalues at or below the support
/// threshold map to zero), so M^p never blows up on a numerical kernel.
pub fn matrix_power_psd(m: &ComplexMatrix, p: f64, tol: &ToleranceSet) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    let mut powered = Vec::with_capacity(eig.values().len());
    for &v in eig.values() {
        if v < -tol.psd {
            return Err(Error::NotPositive {
                eigenvalue: v,
                tol: tol.psd,
            });
        }
        let v = v.max(0.0);
        let w = if p > 0.0 {
            if v == 0.0 {
                0.0
            } else {
                v.powf(p)
            }
        } else if v <= SUPPORT_THRESHOLD {
            0.0
        } else {
            v.powf(p)
        };
        powered.push(w);
    }
    Ok(reconstruct(eig.vectors(), &powered))
}

/// exp(-i t H) for Hermitian H, computed spectrally.
pub fn unitary_exp(h: &ComplexMatrix, t: f64, tol: &ToleranceSet) -> Result<UnitaryMatrix> {
    let eig = hermitian_eig(h, tol)?;
    let v = eig.vectors().matrix();
    let d = v.dim();
    let mut scaled = v.clone();
    for (col, &lambda) in eig.values().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * lambda);
        for row in 0..d {
            scaled[(row, col)] *= phase;
        }
    }
    UnitaryMatrix::new(scaled.matmul(&v.dagger()), tol)
}

/// V diag(values) V^dag.
pub fn reconstruct(vectors: &UnitaryMatrix, values: &[f64]) -> ComplexMatrix {
    let v = vectors.matrix();
    let d = v.dim();
    assert_eq!(values.len(), d);
    let mut scaled = v.clone();
    for col in 0..d {
        for row in 0..d {
            scaled[(row, col)] *= c64(values[col], 0.0);
        }
    }
    scaled.matmul(&v.dagger())
}
