//! Complex linear algebra for finite-dimensional quantum systems.

pub mod density;
pub mod eig;
pub mod matrix;
pub mod random;

pub use density::{validate_density, DensityMatrix, Povm, Spectrum, SpectrumOrder, UnitaryMatrix};
pub use eig::{hermitian_eig, matrix_power_psd, reconstruct, unitary_exp, EigDecomposition};
pub use matrix::{c64, partial_trace_env, tensor_product, ComplexMatrix};
pub use random::{
    haar_unitary, haar_unitary_from, random_density, random_density_from, random_povm,
    random_povm_from, Ensemble, RngSeed,
};
