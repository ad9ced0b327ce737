//! Gate-list circuits: matchgates, R_xx, R_z, R_zz, with optional per-qubit noise.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix};
use crate::majorana::gaussian_unitary;
use crate::qstate::{MixedState, NoiseChannel, PureState, State, DENSE_MIXED_LIMIT};
use crate::rng::SimRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Op {
    /// exp(−i (g/√6) Σ θ_ab B_ab) over the four Majoranas of qubits i and j.
    /// Angles follow lexicographic order of the sorted index set.
    Matchgate { i: usize, j: usize, thetas: [f64; 6], g: f64 },
    /// exp(−i angle/2 X⊗X)
    Rxx { i: usize, j: usize, angle: f64 },
    /// exp(−i angle/2 Z)
    Rz { qubit: usize, angle: f64 },
    /// exp(−i angle/2 Z⊗Z)
    Rzz { i: usize, j: usize, angle: f64 },
}

impl Op {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Matchgate { i, j, .. } | Op::Rxx { i, j, .. } | Op::Rzz { i, j, .. } => vec![i, j],
            Op::Rz { qubit, .. } => vec![qubit],
        }
    }

    fn angles(&self) -> Vec<f64> {
        match self {
            Op::Matchgate { thetas, g, .. } => thetas.iter().copied().chain([*g]).collect(),
            Op::Rxx { angle, .. } | Op::Rz { angle, .. } | Op::Rzz { angle, .. } => vec![*angle],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// Channel on both qubits of every two-qubit gate, right after it.
    AfterTwoQubitGate,
    /// Channel on every qubit at each layer boundary.
    AfterLayer,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitNoise {
    #[serde(flatten)]
    pub channel: NoiseChannel,
    pub placement: NoisePlacement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<CircuitNoise>,
    /// Exclusive end index into `ops` of each layer.
    #[serde(default)]
    pub layer_boundaries: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CircuitSpec {
    pub fn empty(n_qubits: usize) -> Self {
        CircuitSpec { n_qubits, ops: Vec::new(), noise: None, layer_boundaries: Vec::new(), seed: None }
    }

    pub fn with_noise(mut self, noise: Option<CircuitNoise>) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        for (k, op) in self.ops.iter().enumerate() {
            let qs = op.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= n) {
                return Err(Error::QubitIndex { index: q, n });
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::InvalidArgument(format!("op {k}: pair indices must be distinct")));
            }
            if op.angles().iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("op {k}: non-finite angle")));
            }
        }
        if self.layer_boundaries.windows(2).any(|w| w[0] > w[1])
            || self.layer_boundaries.last().is_some_and(|&b| b > self.ops.len())
        {
            return Err(Error::InvalidArgument("layer boundaries must be sorted and within ops".into()));
        }
        if let Some(noise) = &self.noise {
            NoiseChannel::new(noise.channel.kind, noise.channel.strength)?;
        }
        Ok(())
    }

    fn noise_after(&self, k: usize) -> Vec<usize> {
        let Some(noise) = &self.noise else { return Vec::new() };
        match noise.placement {
            NoisePlacement::AfterTwoQubitGate => {
                let qs = self.ops[k].qubits();
                if qs.len() == 2 { qs } else { Vec::new() }
            }
            NoisePlacement::AfterLayer => {
                let hits = self.layer_boundaries.iter().filter(|&&b| b == k + 1).count();
                (0..hits).flat_map(|_| 0..self.n_qubits).collect()
            }
        }
    }
}

/// 1-based Majorana indices {2i+1, 2i+2, 2j+1, 2j+2}, sorted.
pub fn matchgate_majoranas(i: usize, j: usize) -> [usize; 4] {
    let mut m = [2 * i + 1, 2 * i + 2, 2 * j + 1, 2 * j + 2];
    m.sort_unstable();
    m
}

fn matchgate_unitary(n: usize, i: usize, j: usize, thetas: &[f64; 6], g: f64) -> Result<CMatrix> {
    let m = matchgate_majoranas(i, j);
    let scale = g / 6f64.sqrt();
    let mut h = RMatrix::zeros(2 * n, 2 * n);
    let mut t = thetas.iter();
    for x in 0..4 {
        for y in x + 1..4 {
            // quadratic_hamiltonian carries a factor ½
            let w = 2.0 * scale * t.next().expect("six angles");
            h[(m[x] - 1, m[y] - 1)] = w;
            h[(m[y] - 1, m[x] - 1)] = -w;
        }
    }
    gaussian_unitary(&h)
}

fn rxx(angle: f64) -> CMatrix {
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(angle / 2.0).sin());
    let mut u = CMatrix::zeros(4, 4);
    for k in 0..4 {
        u[(k, k)] = c;
        u[(k, 3 - k)] = s;
    }
    u
}

fn rz(angle: f64) -> CMatrix {
    let p = Complex64::from_polar(1.0, -angle / 2.0);
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![p, p.conj()]))
}

fn rzz(angle: f64) -> CMatrix {
    let p = Complex64::from_polar(1.0, -angle / 2.0);
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![p, p.conj(), p.conj(), p]))
}

enum Gate {
    Full(CMatrix),
    Local(CMatrix, Vec<usize>),
}

fn gate(op: &Op, n: usize) -> Result<Gate> {
    Ok(match *op {
        Op::Matchgate { i, j, ref thetas, g } => Gate::Full(matchgate_unitary(n, i, j, thetas, g)?),
        Op::Rxx { i, j, angle } => Gate::Local(rxx(angle), vec![i, j]),
        Op::Rz { qubit, angle } => Gate::Local(rz(angle), vec![qubit]),
        Op::Rzz { i, j, angle } => Gate::Local(rzz(angle), vec![i, j]),
    })
}

/// Runs the circuit on a density matrix, inserting noise per the spec.
pub fn run_circuit(spec: &CircuitSpec, initial: &State) -> Result<MixedState> {
    spec.validate()?;
    let n = spec.n_qubits;
    if initial.n_qubits() != n {
        return Err(Error::Dimension { expected: n, got: initial.n_qubits() });
    }
    if n > DENSE_MIXED_LIMIT {
        return Err(Error::SizeCap { what: "circuit density matrix", n, limit: DENSE_MIXED_LIMIT });
    }
    let mut rho = initial.to_mixed();
    let all: Vec<usize> = (0..n).collect();
    for (k, op) in spec.ops.iter().enumerate() {
        match gate(op, n)? {
            Gate::Full(u) => rho.apply_trusted(&u, &all),
            Gate::Local(u, targets) => rho.apply_trusted(&u, &targets),
        }
        if let Some(noise) = &spec.noise {
            for q in spec.noise_after(k) {
                noise.channel.apply_in_place(&mut rho, q);
            }
        }
    }
    Ok(rho)
}

/// Noiseless state-vector evolution.
pub fn run_circuit_pure(spec: &CircuitSpec, initial: &PureState) -> Result<PureState> {
    spec.validate()?;
    if spec.noise.is_some() {
        return Err(Error::InvalidArgument("noisy circuits need run_circuit".into()));
    }
    let n = spec.n_qubits;
    if initial.n_qubits() != n {
        return Err(Error::Dimension { expected: n, got: initial.n_qubits() });
    }
    let mut psi = initial.clone();
    for op in &spec.ops {
        match gate(op, n)? {
            Gate::Full(u) => {
                let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
                psi = PureState::from_raw(n, (u * v).iter().copied().collect());
            }
            Gate::Local(u, targets) => psi.apply_trusted(&u, &targets),
        }
    }
    Ok(psi)
}

/// Staggered nearest-neighbour matchgates on a ring; θ_ab ~ N(0, 1).
pub fn brickwork_matchgate(n: usize, depth: usize, g: f64, rng: &mut SimRng) -> Result<CircuitSpec> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("brickwork needs even n >= 2, got {n}")));
    }
    if !g.is_finite() {
        return Err(Error::InvalidArgument("non-finite gate strength".into()));
    }
    let mut spec = CircuitSpec::empty(n);
    for layer in 0..depth {
        let offset = layer % 2;
        for k in 0..n / 2 {
            let i = 2 * k + offset;
            let j = (i + 1) % n;
            let mut thetas = [0.0; 6];
            for t in thetas.iter_mut() {
                *t = StandardNormal.sample(rng);
            }
            spec.ops.push(Op::Matchgate { i, j, thetas, g });
        }
        spec.layer_boundaries.push(spec.ops.len());
    }
    Ok(spec)
}
