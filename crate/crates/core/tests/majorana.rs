mod common;

use common::*;
use nongauss::majorana::*;
use nongauss::qstate::{expectation, pauli_to_matrix, PureState, State};
use nongauss::rng::{seeded, SimRng};
use nongauss::statelib::{cat_state, defect_state};
use num_complex::Complex64;
use rand::Rng;

fn gaussian_random(n: usize, rng: &mut SimRng) -> PureState {
    let parity = if rng.random::<bool>() { Parity::Even } else { Parity::Odd };
    gaussian_pure(&random_antisymmetric(n, std::f64::consts::PI, rng), parity).unwrap()
}

fn random_gaussian_mixed(n: usize, rng: &mut SimRng) -> State {
    let scale = rng.random_range(0.1..3.0);
    State::Mixed(gaussian_mixed(&random_antisymmetric(n, scale, rng)).unwrap())
}

/// ψ + t·φ, renormalized.
fn perturb(psi: &PureState, t: f64, rng: &mut SimRng) -> PureState {
    let noise = random_pure(psi.n_qubits(), rng);
    let amps = psi.amplitudes().iter().zip(noise.amplitudes()).map(|(a, b)| a + b * t).collect();
    PureState::from_unnormalized(amps).unwrap()
}

#[test]
fn majoranas_square_to_identity_and_anticommute_densely() {
    let n = 3;
    let mats: Vec<_> = (1..=2 * n).map(|a| pauli_to_matrix(&jw_majorana(a, n).unwrap()).unwrap()).collect();
    let id = nongauss::linalg::CMatrix::identity(8, 8);
    for (a, ga) in mats.iter().enumerate() {
        for (b, gb) in mats.iter().enumerate() {
            let anti = ga * gb + gb * ga;
            let want = if a == b { &id * Complex64::new(2.0, 0.0) } else { id.clone() * Complex64::new(0.0, 0.0) };
            assert!(max_abs_diff(&anti, &want) < 1e-12);
        }
    }
}

#[test]
fn covariance_matches_dense_bilinear_traces() {
    let mut rng = seeded(1);
    let rho = random_mixed(3, 2, &mut rng);
    let gamma = covariance(&State::Mixed(rho.clone()));
    for (a, b) in majorana_pairs(3) {
        let ga = pauli_to_matrix(&jw_majorana(a, 3).unwrap()).unwrap();
        let gb = pauli_to_matrix(&jw_majorana(b, 3).unwrap()).unwrap();
        let bil = (ga * gb) * Complex64::new(0.0, -1.0);
        let want = trace_with(rho.matrix(), &bil).re;
        assert!((gamma.matrix()[(a - 1, b - 1)] - want).abs() < 1e-12);
        assert!((gamma.matrix()[(b - 1, a - 1)] + want).abs() < 1e-12);
    }
}

#[test]
fn faf_is_invariant_under_free_unitaries() {
    let mut rng = seeded(2);
    for n in 1..=5 {
        for _ in 0..4 {
            let psi = random_pure(n, &mut rng);
            let u = gaussian_unitary(&random_antisymmetric(n, 2.0, &mut rng)).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let mut rotated = psi.clone();
            rotated.apply_unitary(&u, &all).unwrap();
            let (a, b): (State, State) = (psi.into(), rotated.into());
            for k in 1..=3 {
                assert!((faf_k(&a, k) - faf_k(&b, k)).abs() < 1e-7, "n={n} k={k}");
            }
        }
    }
}

#[test]
fn faf_trace_and_termwise_routes_agree() {
    let mut rng = seeded(3);
    for n in 1..=4 {
        for mixed in [false, true] {
            let s: State = if mixed { random_mixed(n, 3, &mut rng).into() } else { random_pure(n, &mut rng).into() };
            let cov = covariance(&s);
            assert!((cov.faf(1) - faf1_termwise(&s)).abs() < 1e-9);
            for k in 1..=3 {
                assert!((cov.faf(k) - cov.faf_by_trace(k)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn singular_values_are_doubly_degenerate() {
    let mut rng = seeded(4);
    for n in 1..=4 {
        for _ in 0..5 {
            let s: State = random_mixed(n, 2, &mut rng).into();
            let full = covariance(&s).full_spectrum();
            for pair in full.chunks(2) {
                assert!((pair[0] - pair[1]).abs() < 1e-8, "{full:?}");
            }
        }
    }
}

#[test]
fn pure_gaussian_states_have_zero_faf() {
    let mut rng = seeded(5);
    for n in 1..=5 {
        for _ in 0..4 {
            let s: State = gaussian_random(n, &mut rng).into();
            assert!(faf_k(&s, 1).abs() < 1e-9);
            assert!(covariance(&s).is_pure_gaussian(1e-8));
        }
    }
}

#[test]
fn gaussian_witness_is_sound() {
    let mut rng = seeded(6);
    for i in 0..200 {
        let n = 1 + i % 4;
        let s = random_gaussian_mixed(n, &mut rng);
        let w = witness(&s);
        assert!(w <= 1e-9, "n={n} W={w}");
    }
}

#[test]
fn mixed_gaussian_purity_matches_singular_values() {
    // tr ρ² = Π (1 + ν_j²)/2 for Gaussian ρ
    let mut rng = seeded(7);
    for n in 1..=4 {
        let s = random_gaussian_mixed(n, &mut rng);
        let prod: f64 = covariance(&s).singular_values().iter().map(|v| (1.0 + v * v) / 2.0).product();
        assert!((s.purity() - prod).abs() < 1e-9);
    }
}

#[test]
fn cat_and_defect_closed_forms() {
    for e2 in [0.1, 0.3, 0.5] {
        let s: State = cat_state(4, f64::sqrt(e2)).unwrap().into();
        assert!((faf_k(&s, 1) - 16.0 * e2 * (1.0 - e2)).abs() < 1e-9);
    }
    for n in 4..=6 {
        let s: State = defect_state(n).unwrap().into();
        assert!((faf_k(&s, 1) - 4.0).abs() < 1e-9);
    }
}

#[test]
fn bilinear_expectation_matches_pauli_route() {
    let mut rng = seeded(8);
    let s: State = random_pure(3, &mut rng).into();
    for ((a, b), v) in bilinear_expectations(&s) {
        assert!((expectation(&s, &bilinear(a, b, 3).unwrap()).unwrap() - v).abs() < 1e-12);
    }
}

#[test]
fn distance_sandwich_on_random_states() {
    let mut rng = seeded(9);
    let opts = EpsGOptions { restarts: 1, ..Default::default() };
    let n = 4;
    for i in 0..200 {
        let psi = match i % 4 {
            0 | 1 => random_pure(n, &mut rng),
            2 => {
                let g = gaussian_random(n, &mut rng);
                let t = rng.random_range(0.02..0.4);
                perturb(&g, t, &mut rng)
            }
            _ => cat_state(n, rng.random_range(0.0..1.0)).unwrap(),
        };
        let faf = faf_k(&psi.clone().into(), 1);
        let (lo, hi) = distance_bounds(faf, n).unwrap();
        let e2 = eps_g_bruteforce(&psi, &opts, &mut rng).unwrap().powi(2);
        assert!(lo <= e2 + 0.03, "state {i}: lower {lo} > eps² {e2}");
        assert!(e2 <= hi + 0.03, "state {i}: eps² {e2} > upper {hi}");
    }
}

#[test]
fn defect_state_distance() {
    let opts = EpsGOptions { restarts: 4, ..Default::default() };
    let e = eps_g_bruteforce(&defect_state(4).unwrap(), &opts, &mut seeded(10)).unwrap();
    assert!((e * e - 0.5).abs() < 0.02, "eps_G² = {}", e * e);
}
