//! Single-qubit Kraus channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MixedState, Pauli};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// ρ ↦ (1 − p) ρ + p I/2
    Depolarizing,
    AmplitudeDamping,
    /// Off-diagonal elements scaled by (1 − p).
    Dephasing,
    BitFlip,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub kind: NoiseKind,
    pub strength: f64,
}

impl NoiseChannel {
    pub fn new(kind: NoiseKind, strength: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(Error::InvalidArgument(format!(
                "channel strength {strength} outside [0, 1]"
            )));
        }
        Ok(NoiseChannel { kind, strength })
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        NoiseChannel::new(NoiseKind::Depolarizing, p)
    }

    pub fn kraus(&self) -> Vec<CMatrix> {
        let p = self.strength;
        let scaled = |c: f64, m: CMatrix| m * Complex64::new(c, 0.0);
        match self.kind {
            NoiseKind::Depolarizing => vec![
                scaled((1.0 - 0.75 * p).sqrt(), Pauli::I.matrix()),
                scaled((p / 4.0).sqrt(), Pauli::X.matrix()),
                scaled((p / 4.0).sqrt(), Pauli::Y.matrix()),
                scaled((p / 4.0).sqrt(), Pauli::Z.matrix()),
            ],
            NoiseKind::AmplitudeDamping => vec![
                CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, Complex64::new((1.0 - p).sqrt(), 0.0)]),
                CMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(p.sqrt(), 0.0), ZERO, ZERO]),
            ],
            NoiseKind::Dephasing => vec![
                scaled((1.0 - p / 2.0).sqrt(), Pauli::I.matrix()),
                scaled((p / 2.0).sqrt(), Pauli::Z.matrix()),
            ],
            NoiseKind::BitFlip => vec![
                scaled((1.0 - p).sqrt(), Pauli::I.matrix()),
                scaled(p.sqrt(), Pauli::X.matrix()),
            ],
        }
    }

    /// Applies the channel to one qubit of a density matrix.
    pub fn apply(&self, state: &MixedState, qubit: usize) -> Result<MixedState> {
        if qubit >= state.n_qubits() {
            return Err(Error::QubitIndex { index: qubit, n: state.n_qubits() });
        }
        let mut out = state.clone();
        out.apply_kraus(&self.kraus(), &[qubit]);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, state: &mut MixedState, qubit: usize) {
        state.apply_kraus(&self.kraus(), &[qubit]);
    }
}
