use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{
    bit_of, PauliString, DENSE_MIXED_LIMIT, DENSE_PURE_LIMIT, EIGEN_CLAMP, HERMITIAN_TOL, NORM_TOL,
    PSD_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, kron, unitarity_defect, CMatrix, ONE, ZERO};

fn register_size(len: usize) -> Option<usize> {
    if len.is_power_of_two() && len >= 2 {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = register_size(amps.len()).ok_or_else(|| {
            Error::InvalidState(format!("{} amplitudes is not 2^n with n >= 1", amps.len()))
        })?;
        if n > DENSE_PURE_LIMIT {
            return Err(Error::SizeCap { what: "pure state", n, limit: DENSE_PURE_LIMIT });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2} differs from 1")));
        }
        Ok(PureState { n, amps })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        PureState::new(amps)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > DENSE_PURE_LIMIT {
            return Err(Error::SizeCap { what: "pure state", n, limit: DENSE_PURE_LIMIT });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(PureState { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        PureState::basis(n, 0)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        PureState { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_density(&self) -> MixedState {
        let v = DVector::from_column_slice(&self.amps);
        MixedState { n: self.n, rho: &v * v.adjoint() }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n + other.n;
        if n > DENSE_PURE_LIMIT {
            return Err(Error::SizeCap { what: "pure tensor product", n, limit: DENSE_PURE_LIMIT });
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { n, amps })
    }

    /// Returns P|ψ⟩ as a raw vector.
    pub(crate) fn pauli_image(&self, p: &PauliString) -> Vec<Complex64> {
        let action = p.action();
        let mut out = vec![ZERO; self.dim()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (t, c) = action.apply(b);
            out[t] = c * a;
        }
        out
    }

    pub(crate) fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let action = p.action();
        let mut acc = ZERO;
        for (b, &a) in self.amps.iter().enumerate() {
            let (t, c) = action.apply(b);
            acc += self.amps[t].conj() * c * a;
        }
        acc.re
    }

    pub(crate) fn from_raw_scaled(s: PureState, scale: f64) -> Self {
        PureState { n: s.n, amps: s.amps.into_iter().map(|a| a * scale).collect() }
    }

    pub fn apply_unitary(&mut self, u: &CMatrix, targets: &[usize]) -> Result<()> {
        check_gate(self.n, u, targets)?;
        apply_local(&mut self.amps, self.n, u, targets);
        Ok(())
    }

    /// Applies a gate known to be unitary (constructed internally).
    pub(crate) fn apply_trusted(&mut self, u: &CMatrix, targets: &[usize]) {
        apply_local(&mut self.amps, self.n, u, targets);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n: usize,
    rho: CMatrix,
}

#[derive(Clone, Debug)]
pub struct SpectralComponent {
    pub probability: f64,
    pub state: PureState,
}

impl MixedState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidState("density matrix is not square".into()));
        }
        let n = register_size(rho.nrows()).ok_or_else(|| {
            Error::InvalidState(format!("dimension {} is not 2^n with n >= 1", rho.nrows()))
        })?;
        if n > DENSE_MIXED_LIMIT {
            return Err(Error::SizeCap { what: "mixed state", n, limit: DENSE_MIXED_LIMIT });
        }
        let herm = hermiticity_defect(&rho);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(format!("density matrix deviation {herm:.3e}")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let state = MixedState { n, rho };
        let min_eig = state
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(n: usize, rho: CMatrix) -> Self {
        MixedState { n, rho }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > DENSE_MIXED_LIMIT {
            return Err(Error::SizeCap { what: "mixed state", n, limit: DENSE_MIXED_LIMIT });
        }
        let dim = 1usize << n;
        Ok(MixedState {
            n,
            rho: CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// tr(ρ²), computed as the squared Frobenius norm of a Hermitian matrix.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.hermitian_part()).eigenvalues.iter().copied().collect()
    }

    fn hermitian_part(&self) -> CMatrix {
        (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0)
    }

    /// Spectral decomposition with eigenvalues below the clamp dropped and the rest renormalized.
    /// Components are sorted by decreasing probability.
    pub fn eig_decompose(&self) -> Vec<SpectralComponent> {
        let eig = SymmetricEigen::new(self.hermitian_part());
        let mut comps: Vec<(f64, usize)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l > EIGEN_CLAMP)
            .map(|(i, &l)| (l, i))
            .collect();
        comps.sort_by(|a, b| b.0.total_cmp(&a.0));
        let total: f64 = comps.iter().map(|c| c.0).sum();
        comps
            .into_iter()
            .map(|(l, i)| {
                let col: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
                let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                SpectralComponent {
                    probability: l / total,
                    state: PureState::from_raw(self.n, col.into_iter().map(|a| a / norm).collect()),
                }
            })
            .collect()
    }

    pub fn tensor(&self, other: &MixedState) -> Result<MixedState> {
        let n = self.n + other.n;
        if n > DENSE_MIXED_LIMIT {
            return Err(Error::SizeCap { what: "mixed tensor product", n, limit: DENSE_MIXED_LIMIT });
        }
        Ok(MixedState { n, rho: kron(&self.rho, &other.rho) })
    }

    /// P ρ as a dense matrix.
    pub(crate) fn left_pauli(&self, p: &PauliString) -> CMatrix {
        let action = p.action();
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (t, c) = action.apply(b);
            for j in 0..dim {
                out[(t, j)] = c * self.rho[(b, j)];
            }
        }
        out
    }

    pub(crate) fn pauli_expectation(&self, p: &PauliString) -> f64 {
        // tr(ρP) = Σ_b c(b) ρ[b, b ⊕ x]
        let action = p.action();
        let mut acc = ZERO;
        for b in 0..self.dim() {
            let (t, c) = action.apply(b);
            acc += c * self.rho[(b, t)];
        }
        acc.re
    }

    pub fn apply_unitary(&mut self, u: &CMatrix, targets: &[usize]) -> Result<()> {
        check_gate(self.n, u, targets)?;
        self.apply_trusted(u, targets);
        Ok(())
    }

    pub(crate) fn apply_trusted(&mut self, u: &CMatrix, targets: &[usize]) {
        let full = targets.len() == self.n && targets.iter().enumerate().all(|(i, &t)| i == t);
        if full {
            self.rho = u * &self.rho * u.adjoint();
            return;
        }
        self.rho = conjugate_local(&self.rho, self.n, u, targets);
    }

    /// ρ ↦ Σ_k K_k ρ K_k† with each K_k acting on `targets`.
    pub(crate) fn apply_kraus(&mut self, kraus: &[CMatrix], targets: &[usize]) {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            acc += conjugate_local(&self.rho, self.n, k, targets);
        }
        self.rho = acc;
    }

}

/// K ρ K† for a local operator K.
fn conjugate_local(rho: &CMatrix, n: usize, k: &CMatrix, targets: &[usize]) -> CMatrix {
    let dim = rho.nrows();
    let mut a = rho.clone();
    for j in 0..dim {
        let mut col: Vec<Complex64> = a.column(j).iter().copied().collect();
        apply_local(&mut col, n, k, targets);
        a.column_mut(j).copy_from_slice(&col);
    }
    // (K A†)† = A K†
    let mut b = a.adjoint();
    for j in 0..dim {
        let mut col: Vec<Complex64> = b.column(j).iter().copied().collect();
        apply_local(&mut col, n, k, targets);
        b.column_mut(j).copy_from_slice(&col);
    }
    b.adjoint()
}

fn check_gate(n: usize, u: &CMatrix, targets: &[usize]) -> Result<()> {
    for &t in targets {
        if t >= n {
            return Err(Error::QubitIndex { index: t, n });
        }
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(Error::InvalidArgument(format!("repeated target qubit {t}")));
        }
    }
    let dim = 1usize << targets.len();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::Dimension { expected: dim, got: u.nrows() });
    }
    let defect = unitarity_defect(u);
    if defect > NORM_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

/// Applies a 2^k × 2^k operator to the listed qubits of a raw amplitude vector.
/// `targets[0]` is the most significant bit of the operator's local index.
pub(crate) fn apply_local(amps: &mut [Complex64], n: usize, u: &CMatrix, targets: &[usize]) {
    let k = targets.len();
    let local_dim = 1usize << k;
    let bits: Vec<usize> = targets.iter().map(|&t| bit_of(n, t)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            (0..k)
                .filter(|&m| l & (1 << (k - 1 - m)) != 0)
                .map(|m| bits[m])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; local_dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, &x) in buf.iter().enumerate() {
                acc += u[(r, c)] * x;
            }
            amps[base | off] = acc;
        }
    }
}

/// Either representation, for operations that accept both.
#[derive(Clone, Debug)]
pub enum State {
    Pure(PureState),
    Mixed(MixedState),
}

impl State {
    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(s) => s.n_qubits(),
            State::Mixed(s) => s.n_qubits(),
        }
    }

    pub fn to_mixed(&self) -> MixedState {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(s) => s.clone(),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            State::Pure(_) => 1.0,
            State::Mixed(s) => s.purity(),
        }
    }

    /// Spectral components; a pure state is its own single component.
    pub fn components(&self) -> Vec<SpectralComponent> {
        match self {
            State::Pure(s) => vec![SpectralComponent { probability: 1.0, state: s.clone() }],
            State::Mixed(s) => s.eig_decompose(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(s) => Some(s),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(s: PureState) -> Self {
        State::Pure(s)
    }
}

impl From<MixedState> for State {
    fn from(s: MixedState) -> Self {
        State::Mixed(s)
    }
}

/// ⟨p⟩ for a Hermitian Pauli string.
pub fn expectation(state: &State, p: &PauliString) -> Result<f64> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian(format!("Pauli string {p} has imaginary phase")));
    }
    if p.n_qubits() != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: p.n_qubits() });
    }
    Ok(match state {
        State::Pure(s) => s.pauli_expectation(p),
        State::Mixed(s) => s.pauli_expectation(p),
    })
}

/// Returns the transformed state; the input is left untouched.
pub fn apply_unitary(state: &State, u: &CMatrix, targets: &[usize]) -> Result<State> {
    let mut out = state.clone();
    match &mut out {
        State::Pure(s) => s.apply_unitary(u, targets)?,
        State::Mixed(s) => s.apply_unitary(u, targets)?,
    }
    Ok(out)
}
