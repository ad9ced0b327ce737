//! Calibration states, random ensembles, global depolarizing and the closed
//! forms used to check them.

mod circuit;
mod sweep;

pub use circuit::{
    brickwork_matchgate, matchgate_majoranas, run_circuit, run_circuit_pure, CircuitNoise, CircuitSpec,
    NoisePlacement, Op,
};
pub use sweep::{
    theta_fixture, theta_sweep_experiment, write_sweep_csv, SweepOptions, SweepRow, SWEEP_CSV_HEADER,
};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::majorana::{gaussian_pure, random_antisymmetric, Parity};
use crate::qstate::{MixedState, PureState, DENSE_PURE_LIMIT};
use crate::rng::SimRng;

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    Haar,
    /// Uniform ±1 phases on a random subset of 2^q basis states.
    SubsetPhase {
        q: usize,
        #[serde(default = "default_true")]
        random_phases: bool,
    },
    /// Random pure Gaussian state: generator entries uniform in [−π, π], even reference.
    GaussianRandom,
    /// √(1−ε²)|0ⁿ⟩ + ε|1ⁿ⟩
    Cat { eps: f64 },
    /// (|0000⟩ + |1111⟩)/√2 ⊗ |0⟩^{n−4}
    Defect,
    Basis { x: usize },
    Ghz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub n_qubits: usize,
    #[serde(default = "one")]
    pub draws: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

pub fn cat_state(n: usize, eps: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("cat amplitude {eps} outside [0, 1]")));
    }
    let mut amps = vec![ZERO; checked_dim(n)?];
    let last = amps.len() - 1;
    amps[0] = Complex64::new((1.0 - eps * eps).sqrt(), 0.0);
    amps[last] += Complex64::new(eps, 0.0);
    PureState::from_unnormalized(amps)
}

pub fn defect_state(n: usize) -> Result<PureState> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("defect state needs n >= 4, got {n}")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; checked_dim(n)?];
    amps[0] = Complex64::new(h, 0.0);
    amps[0b1111 << (n - 4)] = Complex64::new(h, 0.0);
    PureState::new(amps)
}

pub fn ghz_state(n: usize) -> Result<PureState> {
    cat_state(n, std::f64::consts::FRAC_1_SQRT_2)
}

pub fn haar_state(n: usize, rng: &mut SimRng) -> Result<PureState> {
    let amps = (0..checked_dim(n)?)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::from_unnormalized(amps)
}

pub fn subset_phase_state(n: usize, q: usize, random_phases: bool, rng: &mut SimRng) -> Result<PureState> {
    if q > n {
        return Err(Error::InvalidArgument(format!("subset exponent q = {q} exceeds n = {n}")));
    }
    let dim = checked_dim(n)?;
    let size = 1usize << q;
    let amp = (size as f64).sqrt().recip();
    let mut amps = vec![ZERO; dim];
    for idx in sample(rng, dim, size) {
        let sign = if random_phases && rng.random::<bool>() { -1.0 } else { 1.0 };
        amps[idx] = Complex64::new(sign * amp, 0.0);
    }
    PureState::from_unnormalized(amps)
}

fn checked_dim(n: usize) -> Result<usize> {
    if n == 0 || n > DENSE_PURE_LIMIT {
        return Err(Error::SizeCap { what: "pure state", n, limit: DENSE_PURE_LIMIT });
    }
    Ok(1usize << n)
}

pub fn make_state(kind: &EnsembleKind, n: usize, rng: &mut SimRng) -> Result<PureState> {
    match kind {
        EnsembleKind::Haar => haar_state(n, rng),
        EnsembleKind::SubsetPhase { q, random_phases } => subset_phase_state(n, *q, *random_phases, rng),
        EnsembleKind::GaussianRandom => {
            checked_dim(n)?;
            let h = random_antisymmetric(n, std::f64::consts::PI, rng);
            gaussian_pure(&h, Parity::Even)
        }
        EnsembleKind::Cat { eps } => cat_state(n, *eps),
        EnsembleKind::Defect => defect_state(n),
        EnsembleKind::Basis { x } => PureState::basis(n, *x),
        EnsembleKind::Ghz => ghz_state(n),
    }
}

/// (1 − p)|ψ⟩⟨ψ| + p I/2ⁿ
pub fn global_depolarize(psi: &PureState, p: f64) -> Result<MixedState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    let mm = MixedState::maximally_mixed(psi.n_qubits())?;
    let rho: CMatrix = psi.to_density().matrix() * Complex64::new(1.0 - p, 0.0) + mm.matrix() * (ONE * p);
    MixedState::new(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolPredictions {
    pub faf1: f64,
    pub purity: f64,
    pub witness: f64,
    pub witness_lower: f64,
}

/// Closed forms for the globally depolarized state, with x = (1 − p)² and
/// r_ψ = n − FAF₁(ψ).
pub fn depol_predictions(r_psi: f64, p: f64, n: usize) -> DepolPredictions {
    let nf = n as f64;
    let x = (1.0 - p) * (1.0 - p);
    let big = 2f64.powi(n as i32);
    DepolPredictions {
        faf1: nf - x * r_psi,
        purity: (1.0 + (big - 1.0) * x) / big,
        witness: nf * (1.0 + (big - 1.0) * x).powf(1.0 / nf) - nf - x * r_psi,
        witness_lower: x * (nf - r_psi),
    }
}

/// E[FAF₁] over Haar-random pure states: n − n(2n−1)/(2ⁿ+1).
pub fn haar_faf_mean(n: usize) -> f64 {
    let nf = n as f64;
    nf - nf * (2.0 * nf - 1.0) / (2f64.powi(n as i32) + 1.0)
}

/// Lower bound on E[FAF₁] for subset phase states with M = 2^q: n − n(2n−1)/M.
pub fn subset_phase_faf_lower(n: usize, q: usize) -> f64 {
    let nf = n as f64;
    nf - nf * (2.0 * nf - 1.0) / 2f64.powi(q as i32)
}

/// ⌈target/(4m)⌉: each m-mode non-Gaussian gate changes FAF₁ by at most 4m.
pub fn nongaussian_gate_lower_bound(faf1_target: f64, m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("gate support m must be >= 1".into()));
    }
    if faf1_target <= 0.0 {
        return Ok(0);
    }
    Ok((faf1_target / (4.0 * m as f64)).ceil() as u64)
}
