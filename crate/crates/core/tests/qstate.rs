mod common;

use common::*;
use nongauss::linalg::{expm, kron, CMatrix};
use nongauss::qstate::*;
use nongauss::rng::seeded;
use nongauss::statelib::{run_circuit_pure, CircuitSpec, Op};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

fn cnot() -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        u[(r, col)] = c(1.0, 0.0);
    }
    u
}

fn pauli(s: &str) -> CMatrix {
    pauli_to_matrix(&s.parse().unwrap()).unwrap()
}

#[test]
fn hadamard_then_cnot_makes_bell_pair() {
    let mut psi = PureState::zero(2).unwrap();
    psi.apply_unitary(&hadamard(), &[0]).unwrap();
    psi.apply_unitary(&cnot(), &[0, 1]).unwrap();
    let a = psi.amplitudes();
    assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((a[3] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!(a[1].norm() < 1e-12 && a[2].norm() < 1e-12);
}

#[test]
fn cnot_with_reversed_targets_controls_on_second_qubit() {
    // |01⟩ with control = qubit 1 flips qubit 0 → |11⟩
    let mut psi = PureState::basis(2, 0b01).unwrap();
    psi.apply_unitary(&cnot(), &[1, 0]).unwrap();
    assert!((psi.amplitudes()[0b11].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn rzz_pi_on_plus_plus_matches_dense_exponential() {
    let mut plus = PureState::zero(2).unwrap();
    plus.apply_unitary(&hadamard(), &[0]).unwrap();
    plus.apply_unitary(&hadamard(), &[1]).unwrap();
    let spec = CircuitSpec { ops: vec![Op::Rzz { i: 0, j: 1, angle: PI }], ..CircuitSpec::empty(2) };
    let out = run_circuit_pure(&spec, &plus).unwrap();
    let zz = kron(&pauli("Z"), &pauli("Z"));
    let oracle = expm(&(zz * c(0.0, -PI / 2.0))) * state_column(&plus);
    for (a, b) in out.amplitudes().iter().zip(oracle.iter()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn local_gate_matches_kronecker_embedding() {
    let mut rng = seeded(11);
    for _ in 0..10 {
        let psi = random_pure(3, &mut rng);
        let u = random_unitary(2, &mut rng);
        let mut out = psi.clone();
        out.apply_unitary(&u, &[1]).unwrap();
        let full = kron(&kron(&CMatrix::identity(2, 2), &u), &CMatrix::identity(2, 2));
        let oracle = full * state_column(&psi);
        for (a, b) in out.amplitudes().iter().zip(oracle.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn pauli_expectation_matches_dense_trace() {
    let mut rng = seeded(12);
    for _ in 0..30 {
        let rho = random_mixed(3, 3, &mut rng);
        let p = random_pauli(3, &mut rng);
        let want = trace_with(rho.matrix(), &pauli_to_matrix(&p).unwrap()).re;
        let got = expectation(&State::Mixed(rho), &p).unwrap();
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn depolarizing_channels_compose() {
    let mut rng = seeded(13);
    for (p1, p2) in [(0.1, 0.2), (0.5, 0.5), (0.0, 0.7), (0.9, 0.3)] {
        let rho = random_mixed(3, 2, &mut rng);
        for q in 0..3 {
            let two = NoiseChannel::depolarizing(p2)
                .unwrap()
                .apply(&NoiseChannel::depolarizing(p1).unwrap().apply(&rho, q).unwrap(), q)
                .unwrap();
            let one = NoiseChannel::depolarizing(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap().apply(&rho, q).unwrap();
            assert!(max_abs_diff(two.matrix(), one.matrix()) < 1e-9);
        }
    }
}

#[test]
fn depolarizing_matches_twirl_oracle() {
    // (1 − p) ρ + p I/2 ⊗ tr_q ρ equals (1 − 3p/4) ρ + (p/4) Σ_P P ρ P
    let mut rng = seeded(14);
    let rho = random_mixed(2, 2, &mut rng);
    let p = 0.37;
    let mut oracle = rho.matrix() * c(1.0 - 0.75 * p, 0.0);
    for s in ["XI", "YI", "ZI"] {
        let m = pauli(s);
        oracle += &m * rho.matrix() * &m * c(p / 4.0, 0.0);
    }
    let got = NoiseChannel::depolarizing(p).unwrap().apply(&rho, 0).unwrap();
    assert!(max_abs_diff(got.matrix(), &oracle) < 1e-12);
}

#[test]
fn purity_is_unitarily_invariant() {
    let mut rng = seeded(15);
    for _ in 0..10 {
        let rho = random_mixed(3, 3, &mut rng);
        let before = rho.purity();
        let mut full = rho.clone();
        full.apply_unitary(&random_unitary(8, &mut rng), &[0, 1, 2]).unwrap();
        let mut local = rho.clone();
        local.apply_unitary(&random_unitary(4, &mut rng), &[2, 0]).unwrap();
        assert!((full.purity() - before).abs() < 1e-9);
        assert!((local.purity() - before).abs() < 1e-9);
    }
}

#[test]
fn every_channel_preserves_trace_and_positivity() {
    let mut rng = seeded(16);
    let rho = random_mixed(2, 4, &mut rng);
    for kind in [NoiseKind::Depolarizing, NoiseKind::AmplitudeDamping, NoiseKind::Dephasing, NoiseKind::BitFlip] {
        for p in [0.0, 0.3, 1.0] {
            let out = NoiseChannel::new(kind, p).unwrap().apply(&rho, 1).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            assert!(out.eigenvalues().iter().all(|&l| l > -1e-12));
        }
    }
}

#[test]
fn eig_decompose_reconstructs_density() {
    let mut rng = seeded(17);
    let rho = random_mixed(3, 3, &mut rng);
    let mut back = CMatrix::zeros(8, 8);
    for comp in rho.eig_decompose() {
        back += comp.state.to_density().matrix() * c(comp.probability, 0.0);
    }
    assert!(max_abs_diff(&back, rho.matrix()) < 1e-10);
}

#[test]
fn measurement_statistics_match_expectation() {
    let mut rng = seeded(18);
    for mixed in [false, true] {
        let state: State = if mixed {
            random_mixed(3, 2, &mut rng).into()
        } else {
            random_pure(3, &mut rng).into()
        };
        let p = "XZY".parse::<PauliString>().unwrap();
        let exact = expectation(&state, &p).unwrap();
        let shots = 100_000;
        let sum: f64 = (0..shots).map(|_| measure_pauli(&state, &p, &mut rng).unwrap().0 as f64).sum();
        let mean = sum / shots as f64;
        let se = ((1.0 - exact * exact) / shots as f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * se, "mean {mean} exact {exact}");
    }
}

#[test]
fn post_measurement_state_is_an_eigenstate() {
    let mut rng = seeded(19);
    let psi: State = random_pure(3, &mut rng).into();
    let p = "ZXI".parse::<PauliString>().unwrap();
    let (outcome, post) = measure_pauli(&psi, &p, &mut rng).unwrap();
    assert!((expectation(&post, &p).unwrap() - outcome as f64).abs() < 1e-10);
}

#[test]
fn cat_readout_frequencies() {
    let mut rng = seeded(20);
    let cat: State = nongauss::statelib::cat_state(4, 0.3f64.sqrt()).unwrap().into();
    let shots = 20_000;
    let ones = (0..shots).filter(|_| sample_computational(&cat, &mut rng).value == 0b1111).count();
    let freq = ones as f64 / shots as f64;
    let se = (0.3 * 0.7 / shots as f64).sqrt();
    assert!((freq - 0.3).abs() < 3.0 * se);
}

#[test]
fn size_caps_are_errors() {
    assert!(matches!(PureState::zero(DENSE_PURE_LIMIT + 1), Err(nongauss::Error::SizeCap { .. })));
    assert!(matches!(MixedState::maximally_mixed(DENSE_MIXED_LIMIT + 1), Err(nongauss::Error::SizeCap { .. })));
}
