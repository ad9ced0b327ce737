//! The 4-qubit θ-sweep: matchgate layers around a single R_zz(θ).

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::{run_circuit, CircuitNoise, CircuitSpec, NoisePlacement, Op};
use crate::bell::estimate_witness_bell;
use crate::error::{Error, Result};
use crate::majorana::witness;
use crate::numfmt::sig12;
use crate::qstate::{NoiseChannel, NoiseKind, PureState, State};
use crate::rng::{seeded, SimRng};

/// Fixture circuit on |0000⟩: free R_xx / R_z layers around one R_zz(θ) on
/// the middle pair. Noiselessly W = FAF₁ = 4 sin²θ. With depolarizing noise
/// after each two-qubit gate, small p raises W for θ up to about 0.59.
pub fn theta_fixture(theta: f64, noise: Option<CircuitNoise>) -> CircuitSpec {
    let h = FRAC_PI_2;
    let rz_layer = || (0..4).map(move |q| Op::Rz { qubit: q, angle: h });
    let mut ops = vec![
        Op::Rxx { i: 0, j: 1, angle: h },
        Op::Rxx { i: 2, j: 3, angle: h },
        Op::Rxx { i: 1, j: 2, angle: h },
    ];
    ops.extend(rz_layer());
    ops.push(Op::Rzz { i: 1, j: 2, angle: theta });
    ops.push(Op::Rxx { i: 1, j: 2, angle: h });
    ops.extend(rz_layer());
    CircuitSpec { n_qubits: 4, ops, noise, layer_boundaries: vec![2, 3, 7, 8, 9, 13], seed: None }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub thetas: Vec<f64>,
    /// Noise strengths; 0 means noiseless.
    pub strengths: Vec<f64>,
    pub noise_kind: NoiseKind,
    pub placement: NoisePlacement,
    /// Bell shots per point; 0 skips the estimate.
    pub shots: usize,
    pub delta: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            thetas: (0..=8).map(|k| k as f64 * FRAC_PI_2 / 8.0).collect(),
            strengths: vec![0.0],
            noise_kind: NoiseKind::Depolarizing,
            placement: NoisePlacement::AfterTwoQubitGate,
            shots: 0,
            delta: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub p: f64,
    pub witness_exact: f64,
    pub witness_est: Option<f64>,
    pub stderr: Option<f64>,
    pub shots: usize,
    pub seed: u64,
}

pub const SWEEP_CSV_HEADER: &str = "theta,p,witness_exact,witness_est,stderr,shots,seed";

fn point(theta: f64, p: f64, opts: &SweepOptions, seed: u64) -> Result<SweepRow> {
    let noise = if p > 0.0 {
        Some(CircuitNoise { channel: NoiseChannel::new(opts.noise_kind, p)?, placement: opts.placement })
    } else {
        None
    };
    let rho = run_circuit(&theta_fixture(theta, noise), &PureState::zero(4)?.into())?;
    let state = State::Mixed(rho);
    let exact = witness(&state);
    let (est, se) = if opts.shots > 0 {
        let r = estimate_witness_bell(&state, opts.shots, opts.delta, &mut seeded(seed))?;
        (Some(r.mean), Some(r.std_error))
    } else {
        (None, None)
    };
    Ok(SweepRow { theta, p, witness_exact: exact, witness_est: est, stderr: se, shots: opts.shots, seed })
}

/// One row per (θ, p), θ-major. Each row gets its own seed drawn from `rng`.
pub fn theta_sweep_experiment(opts: &SweepOptions, rng: &mut SimRng) -> Result<Vec<SweepRow>> {
    if let Some(t) = opts.thetas.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite theta {t}")));
    }
    let jobs: Vec<(f64, f64, u64)> = opts
        .thetas
        .iter()
        .flat_map(|&t| opts.strengths.iter().map(move |&p| (t, p)))
        .map(|(t, p)| (t, p, rng.random()))
        .collect();
    jobs.into_par_iter().map(|(t, p, seed)| point(t, p, opts, seed)).collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidArgument(format!("sweep CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER.split(',')).map_err(err)?;
    for r in rows {
        w.write_record([
            sig12(r.theta),
            sig12(r.p),
            sig12(r.witness_exact),
            fmt_opt(r.witness_est),
            fmt_opt(r.stderr),
            r.shots.to_string(),
            r.seed.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(theta: f64, p: f64) -> f64 {
        let opts = SweepOptions { thetas: vec![theta], strengths: vec![p], ..Default::default() };
        theta_sweep_experiment(&opts, &mut seeded(0)).unwrap()[0].witness_exact
    }

    #[test]
    fn endpoints() {
        assert!(exact(0.0, 0.0).abs() < 1e-7);
        assert!((exact(FRAC_PI_2, 0.0) - 4.0).abs() < 1e-7);
    }

    #[test]
    fn noiseless_curve_is_four_sin_squared() {
        for k in 0..=16 {
            let t = k as f64 * FRAC_PI_2 / 16.0;
            assert!((exact(t, 0.0) - 4.0 * t.sin().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn small_noise_raises_small_theta_and_lowers_large() {
        use std::f64::consts::PI;
        assert!(exact(PI / 8.0, 0.05) > exact(PI / 8.0, 0.0));
        assert!(exact(FRAC_PI_2, 0.05) < exact(FRAC_PI_2, 0.0));
        assert!(exact(PI / 4.0, 0.05) < exact(PI / 4.0, 0.0));
    }

    #[test]
    fn csv_layout() {
        let opts = SweepOptions { thetas: vec![0.1], strengths: vec![0.0, 0.05], ..Default::default() };
        let rows = theta_sweep_experiment(&opts, &mut seeded(4)).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 7);
    }
}
