//! Jordan–Wigner Majorana operators, covariance matrices and the antiflatness
//! measures derived from them.
//!
//! Majorana indices are 1-based: γ_{2j−1} = Z_0⋯Z_{j−2} X_{j−1} and
//! γ_{2j} = Z_0⋯Z_{j−2} Y_{j−1} on qubits 0..n.

mod distance;
mod gaussian;

pub use distance::{eps_g_bruteforce, max_gaussian_overlap, EpsGOptions, EpsGResult};
pub use gaussian::{
    gaussian_mixed, gaussian_pure, gaussian_unitary, quadratic_hamiltonian, random_antisymmetric, GaussianParams,
    Generator, Parity,
};

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{antisymmetry_defect, RMatrix};
use crate::qstate::{Pauli, PauliString, Phase, State};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MajoranaIndex(usize);

impl MajoranaIndex {
    pub fn new(a: usize, n: usize) -> Result<Self> {
        if a == 0 || a > 2 * n {
            return Err(Error::MajoranaIndex { index: a, max: 2 * n });
        }
        Ok(MajoranaIndex(a))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Qubit (mode) carrying this Majorana, 0-based.
    pub fn mode(self) -> usize {
        (self.0 - 1) / 2
    }
}

pub fn jw_majorana(a: usize, n: usize) -> Result<PauliString> {
    let idx = MajoranaIndex::new(a, n)?;
    let j = idx.mode();
    let mut letters = vec![Pauli::I; n];
    letters[..j].fill(Pauli::Z);
    letters[j] = if a % 2 == 1 { Pauli::X } else { Pauli::Y };
    Ok(PauliString::new(Phase::PlusOne, letters))
}

/// B_ab = −i γ_a γ_b.
pub fn bilinear(a: usize, b: usize, n: usize) -> Result<PauliString> {
    if a == b {
        return Err(Error::InvalidArgument(format!("bilinear requires a != b, got a = b = {a}")));
    }
    let prod = jw_majorana(a, n)?.try_mul(&jw_majorana(b, n)?)?;
    Ok(prod.clone().with_phase(prod.phase() * Phase::MinusI))
}

/// All pairs a < b in lexicographic order, 1-based.
pub fn majorana_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=2 * n).flat_map(move |a| (a + 1..=2 * n).map(move |b| (a, b)))
}

/// ⟨B_ab⟩ for every pair a < b, in [`majorana_pairs`] order.
pub fn bilinear_expectations(state: &State) -> Vec<((usize, usize), f64)> {
    let n = state.n_qubits();
    majorana_pairs(n)
        .map(|(a, b)| {
            let p = bilinear(a, b, n).expect("valid pair");
            let v = crate::qstate::expectation(state, &p).expect("bilinears are Hermitian");
            ((a, b), v)
        })
        .collect()
}

const ANTISYM_TOL: f64 = 1e-9;
const SV_TOL: f64 = 1e-8;
const EIG_CLAMP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    gamma: RMatrix,
    sv: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn new(gamma: RMatrix) -> Result<Self> {
        if !gamma.is_square() || !gamma.nrows().is_multiple_of(2) || gamma.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "covariance must be 2n x 2n, got {:?}",
                gamma.shape()
            )));
        }
        let defect = antisymmetry_defect(&gamma);
        if defect > ANTISYM_TOL {
            return Err(Error::NotAntisymmetric(defect));
        }
        let sv = paired_singular_values(&gamma)?;
        if sv[0] > 1.0 + SV_TOL {
            return Err(Error::InvalidState(format!("singular value {} exceeds 1", sv[0])));
        }
        Ok(CovarianceMatrix { n_modes: gamma.nrows() / 2, gamma, sv })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.gamma
    }

    /// ν_1 ≥ … ≥ ν_n.
    pub fn singular_values(&self) -> &[f64] {
        &self.sv
    }

    /// Full 2n singular spectrum, each value repeated as computed.
    pub fn full_spectrum(&self) -> Vec<f64> {
        spectrum_of_minus_square(&self.gamma)
    }

    /// FAF_k = n − Σ_j ν_j^{2k}.
    pub fn faf(&self, k: u32) -> f64 {
        assert!(k >= 1, "FAF order must be >= 1");
        self.n_modes as f64 - self.sv.iter().map(|v| v.powi(2 * k as i32)).sum::<f64>()
    }

    /// n − ½ tr[(−Γ²)^k], evaluated by repeated multiplication.
    pub fn faf_by_trace(&self, k: u32) -> f64 {
        assert!(k >= 1, "FAF order must be >= 1");
        let m = -(&self.gamma * &self.gamma);
        let mut power = m.clone();
        for _ in 1..k {
            power = &power * &m;
        }
        self.n_modes as f64 - 0.5 * power.trace()
    }

    /// Γ² = −I within tolerance.
    pub fn is_pure_gaussian(&self, tol: f64) -> bool {
        let sq = &self.gamma * &self.gamma;
        let dim = sq.nrows();
        (0..dim).all(|i| (0..dim).all(|j| {
            let target = if i == j { -1.0 } else { 0.0 };
            (sq[(i, j)] - target).abs() <= tol
        }))
    }
}

/// Eigenvalues of −Γ² (clamped at zero), square-rooted, descending.
fn spectrum_of_minus_square(gamma: &RMatrix) -> Vec<f64> {
    let m = -(gamma * gamma);
    let sym = (&m + m.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .map(|&l| if l < 0.0 && l > -EIG_CLAMP { 0.0 } else { l })
        .map(|l| l.max(0.0).sqrt())
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

fn paired_singular_values(gamma: &RMatrix) -> Result<Vec<f64>> {
    let full = spectrum_of_minus_square(gamma);
    Ok(full.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Γ_ab = ⟨B_ab⟩ for a < b, mirrored with sign.
pub fn covariance(state: &State) -> CovarianceMatrix {
    let n = state.n_qubits();
    let mut gamma = RMatrix::zeros(2 * n, 2 * n);
    for ((a, b), v) in bilinear_expectations(state) {
        gamma[(a - 1, b - 1)] = v;
        gamma[(b - 1, a - 1)] = -v;
    }
    CovarianceMatrix::new(gamma).expect("covariance of a valid state")
}

pub fn faf_k(state: &State, k: u32) -> f64 {
    covariance(state).faf(k)
}

/// n − Σ_{a<b} ⟨B_ab⟩², without forming the covariance matrix.
pub fn faf1_termwise(state: &State) -> f64 {
    state.n_qubits() as f64 - bilinear_expectations(state).iter().map(|(_, v)| v * v).sum::<f64>()
}

/// W = FAF₁ − 2n (1 − P^{1/n}).
pub fn witness_from_parts(faf1: f64, purity: f64, n: usize) -> f64 {
    let nf = n as f64;
    faf1 - 2.0 * nf * (1.0 - purity.powf(1.0 / nf))
}

/// Purity-corrected witness. Pure states use purity 1 exactly.
pub fn witness(state: &State) -> f64 {
    let faf1 = faf_k(state, 1);
    let purity = match state {
        State::Pure(_) => 1.0,
        State::Mixed(m) => m.purity(),
    };
    witness_from_parts(faf1, purity, state.n_qubits())
}

/// Bounds on ε_G² implied by FAF₁: (FAF₁/(4n), FAF₁/2), clamped to [0, 1].
pub fn distance_bounds(faf1: f64, n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    if n == 0 || !(-1e-9..=nf + 1e-9).contains(&faf1) {
        return Err(Error::InvalidArgument(format!("FAF1 = {faf1} outside [0, {n}]")));
    }
    let f = faf1.max(0.0);
    Ok(((f / (4.0 * nf)).clamp(0.0, 1.0), (f / 2.0).clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{pauli_to_matrix, MixedState, PureState};
    use num_complex::Complex64;

    fn letters(p: &PauliString) -> String {
        p.to_string()
    }

    #[test]
    fn jw_examples() {
        assert_eq!(letters(&jw_majorana(1, 2).unwrap()), "+XI");
        assert_eq!(letters(&jw_majorana(4, 2).unwrap()), "+ZY");
        assert!(jw_majorana(0, 2).is_err());
        assert!(jw_majorana(5, 2).is_err());
    }

    #[test]
    fn majoranas_anticommute_as_strings() {
        let n = 3;
        for a in 1..=2 * n {
            for b in 1..=2 * n {
                let ga = jw_majorana(a, n).unwrap();
                let gb = jw_majorana(b, n).unwrap();
                let ab = &ga * &gb;
                let ba = &gb * &ga;
                if a == b {
                    assert!(ab.is_identity_letters() && ab.phase() == Phase::PlusOne);
                } else {
                    assert_eq!(ab.letters(), ba.letters());
                    assert_eq!(ab.phase(), ba.phase() * Phase::MinusOne);
                }
            }
        }
    }

    #[test]
    fn bilinear_examples() {
        // −i·X·Y = −i·iZ = Z
        assert_eq!(letters(&bilinear(1, 2, 1).unwrap()), "+Z");
        // −i (X⊗I)(Z⊗X) = −i (XZ ⊗ X) = −i(−iY ⊗ X) = −Y⊗X
        let b13 = bilinear(1, 3, 2).unwrap();
        assert_eq!(letters(&b13), "-YX");
        assert!(b13.is_hermitian());
        let sq = &b13 * &b13;
        assert!(sq.is_identity_letters() && sq.phase() == Phase::PlusOne);
        assert_eq!(bilinear(3, 1, 2).unwrap(), b13.negated());
        assert!(bilinear(2, 2, 2).is_err());
    }

    #[test]
    fn dense_bilinear_is_hermitian_involution() {
        let n = 3;
        for (a, b) in majorana_pairs(n) {
            let m = pauli_to_matrix(&bilinear(a, b, n).unwrap()).unwrap();
            let herm = &m - m.adjoint();
            assert!(herm.iter().all(|z| z.norm() < 1e-14));
            let sq = &m * &m - crate::linalg::CMatrix::identity(8, 8);
            assert!(sq.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn vacuum_covariance_is_standard_form() {
        let s: State = PureState::zero(3).unwrap().into();
        let cov = covariance(&s);
        for j in 0..3 {
            assert!((cov.matrix()[(2 * j, 2 * j + 1)] - 1.0).abs() < 1e-14);
            assert!((cov.matrix()[(2 * j + 1, 2 * j)] + 1.0).abs() < 1e-14);
        }
        assert!(cov.singular_values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(cov.is_pure_gaussian(1e-8));
        for k in 1..=3 {
            assert!(cov.faf(k).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_covariance_vanishes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0] = Complex64::new(h, 0.0);
        amps[15] = Complex64::new(h, 0.0);
        let s: State = PureState::new(amps).unwrap().into();
        let all = bilinear_expectations(&s);
        assert_eq!(all.len(), 28);
        assert!(all.iter().all(|(_, v)| v.abs() < 1e-14));
        let cov = covariance(&s);
        assert!(cov.singular_values().iter().all(|&v| v.abs() < 1e-12));
        assert!((cov.faf(1) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_has_zero_covariance_and_zero_witness() {
        for n in 1..=4 {
            let s: State = MixedState::maximally_mixed(n).unwrap().into();
            assert!(covariance(&s).matrix().iter().all(|v| v.abs() < 1e-15));
            assert!(witness(&s).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_bound_examples() {
        assert_eq!(distance_bounds(0.0, 3).unwrap(), (0.0, 0.0));
        let (lo, hi) = distance_bounds(4.0, 4).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && hi == 1.0);
        assert!(lo <= 0.5 && 0.5 <= hi);
        let faf = 4.0 * 4.0 * 0.01 * 0.99;
        let (lo, hi) = distance_bounds(faf, 4).unwrap();
        assert!((faf - 0.1584).abs() < 1e-12);
        assert!((lo - 0.0099).abs() < 1e-12 && (hi - 0.0792).abs() < 1e-12);
        assert!(lo <= 0.01 && 0.01 <= hi);
        assert!(distance_bounds(5.0, 4).is_err());
    }

    #[test]
    fn covariance_rejects_non_antisymmetric() {
        let mut g = RMatrix::zeros(2, 2);
        g[(0, 1)] = 0.5;
        g[(1, 0)] = 0.4;
        assert!(matches!(CovarianceMatrix::new(g), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn thermal_product_witness_is_nonpositive() {
        // Product of single-mode states with ⟨Z⟩ = ν_j: purity ∏(1+ν²)/2.
        let nus = [0.9, 0.3];
        let single = |nu: f64| {
            let m = crate::linalg::CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new((1.0 + nu) / 2.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new((1.0 - nu) / 2.0, 0.0),
                ],
            );
            MixedState::new(m).unwrap()
        };
        let rho = single(nus[0]).tensor(&single(nus[1])).unwrap();
        let expected_purity: f64 = nus.iter().map(|v| (1.0 + v * v) / 2.0).product();
        assert!((rho.purity() - expected_purity).abs() < 1e-14);
        let s: State = rho.into();
        let faf = faf_k(&s, 1);
        assert!((faf - (2.0 - 0.81 - 0.09)).abs() < 1e-12);
        let w = witness(&s);
        assert!(w <= 0.0, "witness {w}");
        assert!((w - witness_from_parts(1.1, expected_purity, 2)).abs() < 1e-12);
    }
}
