//! One function per command. Each fills a report and says whether a tester
//! rejected (exit code 1).

use anyhow::{anyhow, bail, Context, Result};
use nongauss::bell::{
    bell_gaussianity_test, bell_record, bell_test_shots, estimate_coherence_bell, estimate_purity_bell,
    faf1_from_samples, witness_from_samples, write_ndjson, TestVerdict,
};
use nongauss::estimate::{mean, median_of_means_batches, sample_variance};
use nongauss::majorana::{covariance, distance_bounds, witness};
use nongauss::matching::{
    build_layers, estimate_faf1_single, randomized_pair_estimate, single_copy_shots_per_layer, single_copy_test,
};
use nongauss::qstate::{NoiseChannel, PureState, State};
use nongauss::rng::{seeded, split, SimRng};
use nongauss::statelib::{
    brickwork_matchgate, depol_predictions, global_depolarize, haar_faf_mean, make_state, run_circuit,
    run_circuit_pure, subset_phase_faf_lower, theta_sweep_experiment, CircuitNoise, CircuitSpec, EnsembleKind,
    EnsembleSpec, SweepOptions,
};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{load_json_arg, Command, NoiseArg, PlacementArg, RunConfig, StateKind};
use crate::report::{Report, Table};

pub struct Outcome {
    pub report: Report,
    pub reject: bool,
}

const DEFAULT_DELTA: f64 = 0.01;
const DEFAULT_BELL_SHOTS: usize = 100_000;
const DEFAULT_SHOTS_PER_LAYER: usize = 500;
/// Typical two-qubit-gate depolarizing strength on current devices; a default only.
const DEVICE_DEPOL_P: f64 = 0.036;

pub fn run(mut cfg: RunConfig) -> Result<Outcome> {
    let cmd = cfg.command()?;
    let mut report = Report::new(cmd.name(), RunConfig::default());
    let reject = match cmd {
        Command::Faf => faf(&mut cfg, &mut report)?,
        Command::Witness => witness_cmd(&mut cfg, &mut report)?,
        Command::BellEstimate => bell_estimate(&mut cfg, &mut report)?,
        Command::SingleEstimate => single_estimate(&mut cfg, &mut report)?,
        Command::TestBell => test_bell(&mut cfg, &mut report)?,
        Command::TestSingle => test_single(&mut cfg, &mut report)?,
        Command::SweepTheta => sweep_theta(&mut cfg, &mut report)?,
        Command::SweepDepol => sweep_depol(&mut cfg, &mut report)?,
        Command::Brickwork => brickwork(&mut cfg, &mut report)?,
        Command::Layers => layers(&mut cfg, &mut report)?,
        Command::EnsembleStats => ensemble_stats(&mut cfg, &mut report)?,
    };
    report.config = cfg;
    Ok(Outcome { report, reject })
}

fn delta(cfg: &mut RunConfig) -> Result<f64> {
    let d = *cfg.delta.get_or_insert(DEFAULT_DELTA);
    if !(d > 0.0 && d < 1.0) {
        bail!("--delta must lie in (0, 1), got {d}");
    }
    Ok(d)
}

/// The state named by the config, optionally globally depolarized.
fn prepare_state(cfg: &mut RunConfig, rng: Option<&mut SimRng>) -> Result<State> {
    let sources = [cfg.state.is_some(), cfg.state_json.is_some(), cfg.circuit.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        bail!("give exactly one of --state, --state-json, --circuit");
    }
    let mut fallback;
    let rng = match rng {
        Some(r) => r,
        None => {
            fallback = seeded(0);
            &mut fallback
        }
    };
    let state: State = if let Some(arg) = &cfg.circuit {
        let spec: CircuitSpec = load_json_arg(arg, "circuit spec")?;
        let zero = PureState::zero(spec.n_qubits)?;
        cfg.n = Some(spec.n_qubits);
        if spec.noise.is_some() {
            State::Mixed(run_circuit(&spec, &zero.into())?)
        } else {
            State::Pure(run_circuit_pure(&spec, &zero)?)
        }
    } else if let Some(arg) = &cfg.state_json {
        let spec: EnsembleSpec = load_json_arg(arg, "state spec")?;
        cfg.n = Some(spec.n_qubits);
        make_state(&spec.kind, spec.n_qubits, rng)?.into()
    } else {
        let kind = cfg.state.expect("checked above");
        let n = cfg.require_n()?;
        match kind {
            StateKind::Plus => {
                let amp = (1.0 / (1u64 << n) as f64).sqrt();
                PureState::new(vec![num_complex::Complex64::new(amp, 0.0); 1 << n.min(63)])?.into()
            }
            other => make_state(&ensemble_kind(other, cfg)?, n, rng)?.into(),
        }
    };
    match cfg.depolarize {
        Some(p) => {
            let psi = state.as_pure().ok_or_else(|| anyhow!("--depolarize needs a pure input state"))?;
            Ok(State::Mixed(global_depolarize(psi, p)?))
        }
        None => Ok(state),
    }
}

fn ensemble_kind(kind: StateKind, cfg: &RunConfig) -> Result<EnsembleKind> {
    Ok(match kind {
        StateKind::Vacuum => EnsembleKind::Basis { x: 0 },
        StateKind::Basis => EnsembleKind::Basis { x: cfg.x.ok_or_else(|| anyhow!("--x is required for basis"))? },
        StateKind::Ghz => EnsembleKind::Ghz,
        StateKind::Cat => {
            let e2 = cfg.eps2.ok_or_else(|| anyhow!("--eps2 is required for cat"))?;
            if !(0.0..=1.0).contains(&e2) {
                bail!("--eps2 must lie in [0, 1], got {e2}");
            }
            EnsembleKind::Cat { eps: e2.sqrt() }
        }
        StateKind::Defect => EnsembleKind::Defect,
        StateKind::Haar => EnsembleKind::Haar,
        StateKind::SubsetPhase => EnsembleKind::SubsetPhase {
            q: cfg.q.ok_or_else(|| anyhow!("--q is required for subset-phase"))?,
            random_phases: true,
        },
        StateKind::GaussianRandom => EnsembleKind::GaussianRandom,
        StateKind::Plus => unreachable!("built directly"),
    })
}

/// A state spec carries its own seed; `--seed` wins when both are given.
fn state_is_random(cfg: &mut RunConfig) -> Result<bool> {
    if let Some(arg) = &cfg.state_json {
        let spec: EnsembleSpec = load_json_arg(arg, "state spec")?;
        cfg.seed.get_or_insert(spec.seed);
        return Ok(true);
    }
    Ok(cfg.state.is_some_and(StateKind::is_random))
}

/// Seeds the state draw and the run from one master seed.
fn seeded_state(cfg: &mut RunConfig, stochastic: bool) -> Result<(State, Option<SimRng>)> {
    if state_is_random(cfg)? || stochastic {
        let mut master = seeded(cfg.require_seed()?);
        let mut streams = split(&mut master, 2);
        let run_rng = streams.pop().expect("two streams");
        let mut state_rng = streams.pop().expect("two streams");
        let state = prepare_state(cfg, Some(&mut state_rng))?;
        Ok((state, Some(run_rng)))
    } else {
        Ok((prepare_state(cfg, None)?, None))
    }
}

fn exact_block(state: &State, report: &mut Report) {
    let cov = covariance(state);
    report.result("faf1_exact", cov.faf(1));
    report.result("purity_exact", state.purity());
    report.result("witness_exact", witness(state));
}

fn faf(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let k = *cfg.k.get_or_insert(1);
    if k == 0 {
        bail!("--k must be >= 1");
    }
    let (state, _) = seeded_state(cfg, false)?;
    let n = state.n_qubits();
    let cov = covariance(&state);
    report.result("n", n);
    report.result("faf_k", cov.faf(k));
    report.result("faf1", cov.faf(1));
    report.result("singular_values", cov.singular_values());
    if state.as_pure().is_some() {
        let (lo, hi) = distance_bounds(cov.faf(1), n)?;
        report.result("eps_g_sq_bounds", json!({"lower": lo, "upper": hi}));
    }
    Ok(false)
}

fn witness_cmd(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let (state, _) = seeded_state(cfg, false)?;
    report.result("n", state.n_qubits());
    report.result("faf1", covariance(&state).faf(1));
    report.result("purity", state.purity());
    report.result("witness", witness(&state));
    report.result("certified_non_gaussian", witness(&state) > 0.0);
    Ok(false)
}

fn bell_estimate(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let d = delta(cfg)?;
    let shots = *cfg.shots.get_or_insert(DEFAULT_BELL_SHOTS);
    let (state, rng) = seeded_state(cfg, true)?;
    let mut rng = rng.expect("stochastic");
    let batches = median_of_means_batches(d)?;
    report.constant("median_of_means_batches", batches);
    report.constant("batch_rule", "ceil(8 ln(1/delta))");
    report.constant("purity_clamp", "[2^-n, 1]");
    let samples = bell_record(&state, shots, &mut rng)?;
    if let Some(path) = &cfg.record {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_ndjson(std::io::BufWriter::new(file), cfg.seed.expect("seeded"), &samples)?;
    }
    report.result("faf1", faf1_from_samples(&samples, d)?);
    report.result("purity", estimate_purity_bell(&samples)?);
    report.result("witness", witness_from_samples(&samples, d)?);
    report.result("coherence", estimate_coherence_bell(&samples)?);
    exact_block(&state, report);
    Ok(false)
}

fn single_estimate(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let d = delta(cfg)?;
    let m = *cfg.shots_per_layer.get_or_insert(DEFAULT_SHOTS_PER_LAYER);
    let trials = *cfg.baseline_trials.get_or_insert(0);
    let (state, rng) = seeded_state(cfg, true)?;
    let mut rng = rng.expect("stochastic");
    report.constant("repetitions", median_of_means_batches(d)?);
    report.constant("layers", 2 * state.n_qubits() - 1);
    report.constant("aggregation", "median over repetitions of n - sum of layer U-statistics");
    report.result("faf1", estimate_faf1_single(&state, m, d, &mut rng)?);
    if trials > 0 {
        report.result("faf1_baseline", randomized_pair_estimate(&state, trials, &mut rng)?);
    }
    exact_block(&state, report);
    Ok(false)
}

fn verdict(report: &mut Report, v: &TestVerdict) -> bool {
    report.result("verdict", if v.accept { "ACCEPT" } else { "REJECT" });
    report.result("details", v);
    !v.accept
}

fn test_params(cfg: &mut RunConfig) -> Result<(f64, f64)> {
    let eps = cfg.epsilon.ok_or_else(|| anyhow!("--epsilon is required"))?;
    Ok((eps, delta(cfg)?))
}

fn test_bell(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let (eps, d) = test_params(cfg)?;
    let (state, rng) = seeded_state(cfg, true)?;
    report.constant("shot_budget", bell_test_shots(state.n_qubits(), eps, d)?);
    report.constant("budget_rule", "ceil((n^2/epsilon^2) ln(1/delta))");
    let v = bell_gaussianity_test(&state, eps, d, &mut rng.expect("stochastic"))?;
    Ok(verdict(report, &v))
}

fn test_single(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let (eps, d) = test_params(cfg)?;
    let (state, rng) = seeded_state(cfg, true)?;
    let eta = eps * eps / 2.0;
    report.constant("eta", eta);
    report.constant("threshold", eps * eps);
    report.constant("shots_per_layer", single_copy_shots_per_layer(state.n_qubits(), eta));
    report.constant("shots_rule", "smallest M with 4n^2/M + 4n^3/M^2 <= eta^2/4");
    report.constant("repetitions", median_of_means_batches(d)?);
    let v = single_copy_test(&state, eps, d, &mut rng.expect("stochastic"))?;
    Ok(verdict(report, &v))
}

fn sweep_theta(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let d = delta(cfg)?;
    let seed = cfg.require_seed()?;
    let opts = SweepOptions {
        thetas: cfg
            .thetas
            .get_or_insert_with(|| (0..=8).map(|k| k as f64 * std::f64::consts::FRAC_PI_2 / 8.0).collect())
            .clone(),
        strengths: cfg.ps.get_or_insert_with(|| vec![0.0, DEVICE_DEPOL_P]).clone(),
        noise_kind: (*cfg.noise.get_or_insert(NoiseArg::Depolarizing)).into(),
        placement: (*cfg.placement.get_or_insert(PlacementArg::AfterTwoQubitGate)).into(),
        shots: *cfg.shots.get_or_insert(0),
        delta: d,
    };
    report.constant(
        "fixture",
        "Rxx(0,1) Rxx(2,3) | Rxx(1,2) | Rz x4 | Rzz(theta)(1,2) | Rxx(1,2) | Rz x4, angles pi/2, from |0000>",
    );
    let rows = theta_sweep_experiment(&opts, &mut seeded(seed))?;
    let mut table = Table::new(&nongauss::statelib::SWEEP_CSV_HEADER.split(',').collect::<Vec<_>>());
    for r in rows {
        table.rows.push(vec![
            json!(r.theta),
            json!(r.p),
            json!(r.witness_exact),
            json!(r.witness_est),
            json!(r.stderr),
            json!(r.shots),
            json!(r.seed),
        ]);
    }
    report.table = Some(table);
    Ok(false)
}

fn sweep_depol(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let d = delta(cfg)?;
    let shots = *cfg.shots.get_or_insert(0);
    let ps = cfg.ps.get_or_insert_with(|| (0..=10).map(|k| k as f64 / 10.0).collect()).clone();
    let (state, rng) = seeded_state(cfg, shots > 0)?;
    let psi = state.as_pure().ok_or_else(|| anyhow!("sweep-depol needs a pure input state"))?.clone();
    let n = psi.n_qubits();
    let faf_psi = covariance(&state).faf(1);
    let seeds: Vec<u64> = match rng {
        Some(mut r) => ps.iter().map(|_| r.random()).collect(),
        None => vec![0; ps.len()],
    };
    let rows = ps
        .par_iter()
        .zip(seeds)
        .map(|(&p, seed)| -> Result<Vec<serde_json::Value>> {
            let rho = State::Mixed(global_depolarize(&psi, p)?);
            let pred = depol_predictions(n as f64 - faf_psi, p, n);
            let est = if shots > 0 {
                let samples = bell_record(&rho, shots, &mut seeded(seed))?;
                Some(witness_from_samples(&samples, d)?)
            } else {
                None
            };
            Ok(vec![
                json!(p),
                json!(covariance(&rho).faf(1)),
                json!(pred.faf1),
                json!(rho.purity()),
                json!(pred.purity),
                json!(witness(&rho)),
                json!(pred.witness),
                json!(pred.witness_lower),
                json!(est.as_ref().map(|e| e.mean)),
                json!(est.as_ref().map(|e| e.std_error)),
                json!(shots),
                json!(seed),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    report.result("faf1_pure", faf_psi);
    let mut table = Table::new(&[
        "p",
        "faf1_exact",
        "faf1_pred",
        "purity_exact",
        "purity_pred",
        "witness_exact",
        "witness_pred",
        "witness_lower",
        "witness_est",
        "stderr",
        "shots",
        "seed",
    ]);
    table.rows = rows;
    report.table = Some(table);
    Ok(false)
}

fn brickwork(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let n = *cfg.n.get_or_insert(4);
    let depth = *cfg.depth.get_or_insert(10);
    let g = *cfg.g.get_or_insert(1.0);
    let seed = cfg.require_seed()?;
    let noise = match cfg.noise {
        Some(kind) => {
            let p = *cfg.p.get_or_insert(0.1);
            let placement = *cfg.placement.get_or_insert(PlacementArg::AfterLayer);
            Some(CircuitNoise { channel: NoiseChannel::new(kind.into(), p)?, placement: placement.into() })
        }
        None => None,
    };
    let mut spec = brickwork_matchgate(n, depth, g, &mut seeded(seed))?.with_noise(noise);
    spec.seed = Some(seed);
    let mut state: State = PureState::zero(n)?.into();
    let mut table = Table::new(&["depth", "faf1", "purity", "witness"]);
    table.rows.push(vec![json!(0), json!(0.0), json!(1.0), json!(0.0)]);
    let mut start = 0;
    for (layer, &end) in spec.layer_boundaries.iter().enumerate() {
        let step = CircuitSpec {
            ops: spec.ops[start..end].to_vec(),
            layer_boundaries: vec![end - start],
            ..CircuitSpec::empty(n).with_noise(spec.noise)
        };
        state = State::Mixed(run_circuit(&step, &state)?);
        table.rows.push(vec![
            json!(layer + 1),
            json!(covariance(&state).faf(1)),
            json!(state.purity()),
            json!(witness(&state)),
        ]);
        start = end;
    }
    report.result("circuit", &spec);
    report.table = Some(table);
    Ok(false)
}

fn layers(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let n = cfg.require_n()?;
    if n > 64 {
        bail!("--n {n} is too large to list");
    }
    let mut table = Table::new(&["layer", "pairs", "observables"]);
    for layer in build_layers(n) {
        let pairs: Vec<String> = layer.pairs_raw().iter().map(|(a, b)| format!("({a},{b})")).collect();
        let obs: Vec<String> = layer.observables.iter().map(|o| o.to_string()).collect();
        table.rows.push(vec![json!(layer.index), json!(pairs.join(" ")), json!(obs.join(" "))]);
    }
    report.result("n_layers", 2 * n - 1);
    report.result("n_pairs", n * (2 * n - 1));
    report.table = Some(table);
    Ok(false)
}

fn ensemble_stats(cfg: &mut RunConfig, report: &mut Report) -> Result<bool> {
    let seed = cfg.require_seed()?;
    let (kind, n) = if let Some(arg) = &cfg.state_json {
        let spec: EnsembleSpec = load_json_arg(arg, "state spec")?;
        cfg.draws.get_or_insert(spec.draws);
        (spec.kind, spec.n_qubits)
    } else {
        let kind = cfg.state.ok_or_else(|| anyhow!("give --state or --state-json"))?;
        if kind == StateKind::Plus {
            bail!("plus is not an ensemble");
        }
        (ensemble_kind(kind, cfg)?, cfg.require_n()?)
    };
    let draws = *cfg.draws.get_or_insert(500);
    if draws < 2 {
        bail!("--draws must be >= 2");
    }
    let values = split(&mut seeded(seed), draws)
        .into_par_iter()
        .map(|mut r| Ok(covariance(&make_state(&kind, n, &mut r)?.into()).faf(1)))
        .collect::<Result<Vec<f64>>>()?;
    report.result("n", n);
    report.result("draws", draws);
    report.result("faf1_mean", mean(&values));
    report.result("faf1_stderr", (sample_variance(&values) / draws as f64).sqrt());
    report.result("faf1_min", values.iter().copied().fold(f64::INFINITY, f64::min));
    report.result("faf1_max", values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    match kind {
        EnsembleKind::Haar => report.result("faf1_haar_mean_closed_form", haar_faf_mean(n)),
        EnsembleKind::SubsetPhase { q, .. } => report.result("faf1_subset_lower_bound", subset_phase_faf_lower(n, q)),
        EnsembleKind::Cat { eps } => {
            let e2 = eps * eps;
            report.result("faf1_closed_form", 4.0 * n as f64 * e2 * (1.0 - e2))
        }
        _ => {}
    }
    Ok(false)
}
