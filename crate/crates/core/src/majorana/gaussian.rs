//! Constructors for pure and mixed fermionic Gaussian states.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{bilinear, majorana_pairs};
use crate::error::{Error, Result};
use crate::linalg::{antisymmetry_defect, expm, CMatrix, RMatrix};
use crate::qstate::{MixedState, PureState, DENSE_MIXED_LIMIT, DENSE_PURE_LIMIT};
use crate::rng::SimRng;

const GENERATOR_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Reference |0…0⟩.
    #[default]
    Even,
    /// Reference |10…0⟩.
    Odd,
}

impl Parity {
    pub fn reference_index(self, n: usize) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1usize << (n - 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// h in exp(−¼ Σ_ab h_ab γ_a γ_b) applied to the reference state.
    Unitary(RMatrix),
    /// K in exp(−(i/2) Σ_{a<b} K_ab γ_a γ_b) / tr(·).
    Mixed(RMatrix),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub generator: Generator,
    #[serde(default)]
    pub parity_reference: Parity,
}

fn check_generator(g: &RMatrix) -> Result<usize> {
    if !g.is_square() || !g.nrows().is_multiple_of(2) || g.nrows() == 0 {
        return Err(Error::InvalidArgument(format!("generator must be 2n x 2n, got {:?}", g.shape())));
    }
    let defect = antisymmetry_defect(g);
    if defect > GENERATOR_TOL {
        return Err(Error::NotAntisymmetric(defect));
    }
    Ok(g.nrows() / 2)
}

/// Σ_{a<b} c · g_ab B_ab as a dense Hermitian matrix.
fn bilinear_sum(g: &RMatrix, n: usize, c: f64) -> CMatrix {
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for (a, b) in majorana_pairs(n) {
        let w = c * g[(a - 1, b - 1)];
        if w == 0.0 {
            continue;
        }
        let action = bilinear(a, b, n).expect("valid pair").action();
        for col in 0..dim {
            let (row, coeff) = action.apply(col);
            h[(row, col)] += coeff * w;
        }
    }
    h
}

/// H = ½ Σ_{a<b} h_ab B_ab, so that exp(−¼ Σ_ab h_ab γ_a γ_b) = exp(−iH).
pub fn quadratic_hamiltonian(h: &RMatrix) -> Result<CMatrix> {
    let n = check_generator(h)?;
    if n > DENSE_PURE_LIMIT {
        return Err(Error::SizeCap { what: "quadratic Hamiltonian", n, limit: DENSE_PURE_LIMIT });
    }
    Ok(bilinear_sum(h, n, 0.5))
}

/// exp(−iH) for the quadratic Hamiltonian of `h`.
pub fn gaussian_unitary(h: &RMatrix) -> Result<CMatrix> {
    let ham = quadratic_hamiltonian(h)?;
    Ok(expm(&(ham * Complex64::new(0.0, -1.0))))
}

pub fn gaussian_pure(h: &RMatrix, parity: Parity) -> Result<PureState> {
    let n = check_generator(h)?;
    let u = gaussian_unitary(h)?;
    let r = parity.reference_index(n);
    let amps: Vec<Complex64> = u.column(r).iter().copied().collect();
    PureState::from_unnormalized(amps)
}

pub fn gaussian_mixed(k: &RMatrix) -> Result<MixedState> {
    let n = check_generator(k)?;
    if n > DENSE_MIXED_LIMIT {
        return Err(Error::SizeCap { what: "mixed Gaussian state", n, limit: DENSE_MIXED_LIMIT });
    }
    // −(i/2) Σ_{a<b} K_ab γ_a γ_b = ½ Σ_{a<b} K_ab B_ab
    let exponent = bilinear_sum(k, n, 0.5);
    let unnorm = expm(&exponent);
    let tr = unnorm.trace().re;
    let rho = unnorm * Complex64::new(1.0 / tr, 0.0);
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    MixedState::new(rho)
}

impl GaussianParams {
    pub fn build_pure(&self) -> Result<PureState> {
        match &self.generator {
            Generator::Unitary(h) => gaussian_pure(h, self.parity_reference),
            Generator::Mixed(_) => Err(Error::InvalidArgument("mixed generator for a pure state".into())),
        }
    }

    pub fn build_mixed(&self) -> Result<MixedState> {
        match &self.generator {
            Generator::Mixed(k) => gaussian_mixed(k),
            Generator::Unitary(h) => Ok(gaussian_pure(h, self.parity_reference)?.to_density()),
        }
    }
}

/// Real antisymmetric 2n×2n matrix with upper entries uniform in [−scale, scale].
pub fn random_antisymmetric(n: usize, scale: f64, rng: &mut SimRng) -> RMatrix {
    let mut m = RMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            let v = rng.random_range(-scale..=scale);
            m[(a, b)] = v;
            m[(b, a)] = -v;
        }
    }
    m
}
