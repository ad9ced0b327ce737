//! Dense pure and mixed qubit states.
//!
//! Basis index convention: qubit 0 is the most significant bit of the basis
//! index. Every module in the crate relies on it.

mod channel;
mod measure;
mod pauli;
mod state;

pub use channel::{NoiseChannel, NoiseKind};
pub(crate) use measure::project_pure_unnormalized;
pub use measure::{measure_pauli, sample_computational, Bits, BasisSampler};
pub use pauli::{pauli_to_matrix, pauli_to_matrix_kron, Pauli, PauliString, Phase};
pub use state::{apply_unitary, expectation, MixedState, PureState, SpectralComponent, State};

/// Largest pure register handled densely.
pub const DENSE_PURE_LIMIT: usize = 12;
/// Largest mixed register handled densely.
pub const DENSE_MIXED_LIMIT: usize = 10;

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as zero when sampling spectral components.
pub const EIGEN_CLAMP: f64 = 1e-12;

#[inline]
pub(crate) fn bit_of(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}
