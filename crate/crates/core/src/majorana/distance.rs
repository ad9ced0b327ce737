//! Brute-force distance from a pure state to the pure Gaussian manifold.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gaussian::{quadratic_hamiltonian, Parity};
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::optimize::NelderMead;
use crate::qstate::PureState;
use crate::rng::{split, SimRng};

pub const EPS_G_MAX_MODES: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsGOptions {
    /// Random restarts per parity sector.
    pub restarts: usize,
    /// Starting generator entries are uniform in [−init_range, init_range].
    pub init_range: f64,
    pub diameter_tol: f64,
    pub max_evals: usize,
}

impl Default for EpsGOptions {
    fn default() -> Self {
        EpsGOptions {
            restarts: 32,
            init_range: std::f64::consts::PI,
            diameter_tol: 1e-6,
            max_evals: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EpsGResult {
    pub eps_g: f64,
    pub max_overlap_sq: f64,
    pub parity: Parity,
    pub generator: RMatrix,
    pub evaluations: usize,
}

fn params_to_generator(n: usize, x: &[f64]) -> RMatrix {
    let mut h = RMatrix::zeros(2 * n, 2 * n);
    let mut k = 0;
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            h[(a, b)] = x[k];
            h[(b, a)] = -x[k];
            k += 1;
        }
    }
    h
}

/// |⟨ref| e^{iH(h)} |ψ⟩|², the squared overlap of ψ with the Gaussian state of `h`.
fn overlap_sq(psi: &PureState, h: &RMatrix, reference: usize) -> f64 {
    let ham = quadratic_hamiltonian(h).expect("generator built antisymmetric");
    let eig = SymmetricEigen::new(ham);
    let v = &eig.eigenvectors;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..v.ncols() {
        let proj: Complex64 = v.column(k).iter().zip(psi.amplitudes()).map(|(e, a)| e.conj() * a).sum();
        acc += v[(reference, k)] * Complex64::from_polar(1.0, eig.eigenvalues[k]) * proj;
    }
    acc.norm_sqr()
}

/// Largest squared overlap found with pure Gaussian states of either parity.
pub fn max_gaussian_overlap(psi: &PureState, opts: &EpsGOptions, rng: &mut SimRng) -> Result<EpsGResult> {
    let n = psi.n_qubits();
    if n > EPS_G_MAX_MODES {
        return Err(Error::SizeCap { what: "eps_G optimizer", n, limit: EPS_G_MAX_MODES });
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("eps_G needs at least one restart".into()));
    }
    let dim = n * (2 * n - 1);
    let nm = NelderMead { diameter_tol: opts.diameter_tol, max_evals: opts.max_evals, initial_step: 0.5 };
    let jobs: Vec<(Parity, SimRng)> = [Parity::Even, Parity::Odd]
        .into_iter()
        .zip(split(rng, 2))
        .flat_map(|(parity, mut r)| split(&mut r, opts.restarts).into_iter().map(move |c| (parity, c)))
        .collect();

    let runs: Vec<(f64, Parity, Vec<f64>, usize)> = jobs
        .into_par_iter()
        .map(|(parity, mut r)| {
            let reference = parity.reference_index(n);
            let x0: Vec<f64> = (0..dim).map(|_| r.random_range(-opts.init_range..=opts.init_range)).collect();
            let m = nm.minimize(|x| 1.0 - overlap_sq(psi, &params_to_generator(n, x), reference), &x0);
            (1.0 - m.value, parity, m.x, m.evals)
        })
        .collect();

    let evaluations = runs.iter().map(|r| r.3).sum();
    let (best, parity, x, _) = runs
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    let best = best.clamp(0.0, 1.0);
    Ok(EpsGResult {
        eps_g: (1.0 - best).sqrt(),
        max_overlap_sq: best,
        parity,
        generator: params_to_generator(n, &x),
        evaluations,
    })
}

/// √(1 − max overlap²); an upper bound on the true ε_G.
pub fn eps_g_bruteforce(psi: &PureState, opts: &EpsGOptions, rng: &mut SimRng) -> Result<f64> {
    Ok(max_gaussian_overlap(psi, opts, rng)?.eps_g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::gaussian_pure;
    use crate::rng::seeded;

    #[test]
    fn overlap_matches_direct_construction() {
        let mut rng = seeded(3);
        let h = crate::majorana::random_antisymmetric(2, 1.0, &mut rng);
        let g = gaussian_pure(&h, Parity::Even).unwrap();
        assert!((overlap_sq(&g, &h, 0) - 1.0).abs() < 1e-10);
        let other = gaussian_pure(&h, Parity::Odd).unwrap();
        assert!(overlap_sq(&other, &h, 0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_is_gaussian() {
        let psi = PureState::zero(2).unwrap();
        let opts = EpsGOptions { restarts: 2, ..Default::default() };
        let e = eps_g_bruteforce(&psi, &opts, &mut seeded(1)).unwrap();
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn refuses_large_registers() {
        let psi = PureState::zero(5).unwrap();
        assert!(eps_g_bruteforce(&psi, &EpsGOptions::default(), &mut seeded(0)).is_err());
    }
}
