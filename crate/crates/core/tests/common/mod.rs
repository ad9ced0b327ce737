#![allow(dead_code)]

use nalgebra::DMatrix;
use nongauss::linalg::{expm, CMatrix};
use nongauss::qstate::{MixedState, Pauli, PauliString, Phase, PureState};
use nongauss::rng::SimRng;
use nongauss::statelib::haar_state;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_hermitian(dim: usize, rng: &mut SimRng) -> CMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn random_unitary(dim: usize, rng: &mut SimRng) -> CMatrix {
    expm(&(random_hermitian(dim, rng) * c(0.0, 1.0)))
}

pub fn random_pure(n: usize, rng: &mut SimRng) -> PureState {
    haar_state(n, rng).unwrap()
}

/// Σ_k p_k |ψ_k⟩⟨ψ_k| with `rank` Haar components and Dirichlet-ish weights.
pub fn random_mixed(n: usize, rank: usize, rng: &mut SimRng) -> MixedState {
    let dim = 1 << n;
    let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(dim, dim);
    for w in weights {
        let psi = random_pure(n, rng);
        rho += psi.to_density().matrix() * c(w / total, 0.0);
    }
    let rho = (&rho + rho.adjoint()) * c(0.5, 0.0);
    MixedState::new(rho).unwrap()
}

pub fn random_pauli(n: usize, rng: &mut SimRng) -> PauliString {
    let letters = (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        })
        .collect();
    PauliString::new(Phase::PlusOne, letters)
}

pub fn state_column(psi: &PureState) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(psi.amplitudes())
}

/// tr(ρ A) for dense matrices.
pub fn trace_with(rho: &CMatrix, a: &CMatrix) -> Complex64 {
    (rho * a).trace()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
