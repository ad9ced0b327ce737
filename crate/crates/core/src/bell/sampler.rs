//! Shot-level simulation of the two-copy Bell readout.
//!
//! Copy 1 occupies qubits 0..n and copy 2 qubits n..2n; mode j pairs qubit j
//! with qubit n + j. Per mode a CNOT from copy 1 to copy 2 is followed by a
//! Hadamard on copy 1, then both registers are read out.
//!
//! For a product |ψ⟩⊗|φ⟩ the readout amplitude is
//! 2^{−n/2} Σ_a (−1)^{u·a} ψ_a φ_{a⊕v}, a Walsh–Hadamard transform in `a` for
//! each fixed `v`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::BellSample;
use crate::error::{Error, Result};
use crate::qstate::{BasisSampler, Bits, PureState, State};
use crate::rng::{split, SimRng};

/// Largest number of modes per copy for Bell sampling (2n-qubit joint readout).
pub const BELL_MAX_MODES: usize = 10;
/// Above this many cached probabilities per component pair, tables are rebuilt per shot.
const CACHE_ENTRIES: usize = 1 << 22;
const CHUNK: usize = 4096;

fn walsh_hadamard(f: &mut [Complex64]) {
    let mut h = 1;
    while h < f.len() {
        for block in (0..f.len()).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (f[i], f[i + h]);
                f[i] = x + y;
                f[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Readout distribution of the Bell circuit on |ψ⟩⊗|φ⟩, indexed by (u << n) | v.
pub fn bell_distribution(psi: &PureState, phi: &PureState) -> Vec<f64> {
    let n = psi.n_qubits();
    let dim = psi.dim();
    let (a1, a2) = (psi.amplitudes(), phi.amplitudes());
    let norm = 1.0 / dim as f64;
    let mut probs = vec![0.0; dim * dim];
    let mut f = vec![Complex64::new(0.0, 0.0); dim];
    for v in 0..dim {
        for a in 0..dim {
            f[a] = a1[a] * a2[a ^ v];
        }
        walsh_hadamard(&mut f);
        for (u, amp) in f.iter().enumerate() {
            probs[(u << n) | v] = amp.norm_sqr() * norm;
        }
    }
    probs
}

/// Draws Bell shots from ρ⊗ρ by sampling two spectral components per shot.
pub struct BellSampler {
    n: usize,
    weights: BasisSampler,
    components: Vec<PureState>,
    /// Readout samplers for every component pair (i, j) at index i·r + j, when small enough.
    tables: Option<Vec<BasisSampler>>,
}

impl BellSampler {
    pub fn new(state: &State) -> Result<Self> {
        let n = state.n_qubits();
        if n > BELL_MAX_MODES {
            return Err(Error::SizeCap { what: "Bell joint readout", n, limit: BELL_MAX_MODES });
        }
        let comps = state.components();
        let weights = BasisSampler::new(&comps.iter().map(|c| c.probability).collect::<Vec<_>>());
        let components: Vec<PureState> = comps.into_iter().map(|c| c.state).collect();
        let r = components.len();
        let dim = 1usize << n;
        let tables = (r == 1 || r * r * dim * dim <= CACHE_ENTRIES).then(|| {
            (0..r * r)
                .map(|k| BasisSampler::new(&bell_distribution(&components[k / r], &components[k % r])))
                .collect()
        });
        Ok(BellSampler { n, weights, components, tables })
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn sample(&self, rng: &mut SimRng) -> BellSample {
        let i = self.weights.sample(rng);
        let j = self.weights.sample(rng);
        let idx = match &self.tables {
            Some(t) => t[i * self.components.len() + j].sample(rng),
            None => BasisSampler::new(&bell_distribution(&self.components[i], &self.components[j])).sample(rng),
        };
        let mask = (1usize << self.n) - 1;
        BellSample::from_bits(Bits::new(self.n, idx >> self.n), Bits::new(self.n, idx & mask))
    }

    /// Draws a record of `n_shots`, in parallel chunks with independent streams.
    pub fn record(&self, n_shots: usize, rng: &mut SimRng) -> Vec<BellSample> {
        let chunks = n_shots.div_ceil(CHUNK);
        split(rng, chunks)
            .into_par_iter()
            .enumerate()
            .flat_map_iter(|(c, mut r)| {
                let len = CHUNK.min(n_shots - c * CHUNK);
                (0..len).map(|_| self.sample(&mut r)).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// One Bell shot on two copies of `state`.
pub fn bell_sample(state: &State, rng: &mut SimRng) -> Result<BellSample> {
    Ok(BellSampler::new(state)?.sample(rng))
}

/// `n_shots` independent Bell shots.
pub fn bell_record(state: &State, n_shots: usize, rng: &mut SimRng) -> Result<Vec<BellSample>> {
    Ok(BellSampler::new(state)?.record(n_shots, rng))
}

