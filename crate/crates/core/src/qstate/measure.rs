use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MixedState, PauliString, PureState, State};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::SimRng;

/// A computational-basis readout. Bit for qubit 0 is the most significant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bits {
    pub n: usize,
    pub value: usize,
}

impl Bits {
    pub fn new(n: usize, value: usize) -> Self {
        debug_assert!(n >= 64 || value < (1usize << n));
        Bits { n, value }
    }

    pub fn from_slice(bits: &[u8]) -> Self {
        let value = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Bits { n: bits.len(), value }
    }

    pub fn get(&self, q: usize) -> u8 {
        ((self.value >> (self.n - 1 - q)) & 1) as u8
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn to_hex(&self) -> String {
        let width = self.n.div_ceil(4).max(1);
        format!("{:0width$x}", self.value, width = width)
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let value = usize::from_str_radix(s, 16)
            .map_err(|e| Error::InvalidArgument(format!("bad hex bit string {s:?}: {e}")))?;
        if n < 64 && value >> n != 0 {
            return Err(Error::InvalidArgument(format!("{s} does not fit in {n} bits")));
        }
        Ok(Bits { n, value })
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over a fixed discrete distribution.
#[derive(Clone, Debug)]
pub struct BasisSampler {
    cdf: Vec<f64>,
}

impl BasisSampler {
    pub fn new(weights: &[f64]) -> Self {
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w.max(0.0);
            cdf.push(acc);
        }
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        BasisSampler { cdf }
    }

    pub fn sample(&self, rng: &mut SimRng) -> usize {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.cdf.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }
}

pub fn sample_computational(state: &State, rng: &mut SimRng) -> Bits {
    let n = state.n_qubits();
    let weights: Vec<f64> = match state {
        State::Pure(s) => s.probabilities(),
        State::Mixed(s) => (0..s.dim()).map(|i| s.matrix()[(i, i)].re).collect(),
    };
    Bits::new(n, BasisSampler::new(&weights).sample(rng))
}

const BRANCH_TOL: f64 = 1e-14;

/// Projective measurement of a Hermitian Pauli string. Returns the ±1 outcome and the
/// renormalized post-measurement state.
pub fn measure_pauli(state: &State, p: &PauliString, rng: &mut SimRng) -> Result<(i8, State)> {
    let expval = super::expectation(state, p)?;
    let prob_plus = ((1.0 + expval) / 2.0).clamp(0.0, 1.0);
    let outcome: i8 = if rng.random::<f64>() < prob_plus { 1 } else { -1 };
    let prob = if outcome == 1 { prob_plus } else { 1.0 - prob_plus };
    if prob < BRANCH_TOL {
        return Err(Error::Numerical(format!("sampled branch has probability {prob:.3e}")));
    }
    let collapsed = match state {
        State::Pure(s) => State::Pure(project_pure(s, p, outcome, prob)),
        State::Mixed(s) => State::Mixed(project_mixed(s, p, outcome, prob)),
    };
    Ok((outcome, collapsed))
}

/// (I + s P)/2 |ψ⟩ / √prob
pub(crate) fn project_pure(s: &PureState, p: &PauliString, sign: i8, prob: f64) -> PureState {
    let image = s.pauli_image(p);
    let scale = 0.5 / prob.sqrt();
    let sgn = sign as f64;
    let amps = s
        .amplitudes()
        .iter()
        .zip(image)
        .map(|(&a, pa)| (a + pa * sgn) * scale)
        .collect();
    PureState::from_raw(s.n_qubits(), amps)
}

/// Unnormalized projection of a pure state, returning the branch weight as well.
pub(crate) fn project_pure_unnormalized(s: &PureState, p: &PauliString, sign: i8) -> (PureState, f64) {
    let image = s.pauli_image(p);
    let sgn = sign as f64;
    let amps: Vec<Complex64> = s
        .amplitudes()
        .iter()
        .zip(image)
        .map(|(&a, pa)| (a + pa * sgn) * 0.5)
        .collect();
    let w = amps.iter().map(|a| a.norm_sqr()).sum();
    (PureState::from_raw(s.n_qubits(), amps), w)
}

fn project_mixed(s: &MixedState, p: &PauliString, sign: i8, prob: f64) -> MixedState {
    // Π ρ Π with Π = (I + sP)/2: (ρ + sPρ + sρP + PρP)/4
    let p_rho = s.left_pauli(p);
    let rho_p = p_rho.adjoint();
    let p_rho_p = MixedState::from_raw(s.n_qubits(), rho_p.clone()).left_pauli(p);
    let sgn = Complex64::new(sign as f64, 0.0);
    let sum: CMatrix = s.matrix() + (p_rho + rho_p) * sgn + p_rho_p;
    MixedState::from_raw(s.n_qubits(), sum * Complex64::new(0.25 / prob, 0.0))
}
