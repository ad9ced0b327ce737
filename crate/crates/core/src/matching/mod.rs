//! Single-copy protocol. The n(2n−1) Majorana bilinears are partitioned into
//! 2n−1 layers of n mode-disjoint (hence commuting) pairs; each layer is
//! measured jointly on fresh copies and a pairwise U-statistic turns the shot
//! table into an unbiased estimate of Σ_e ⟨B_e⟩².

mod layers;
mod shots;

pub use layers::{build_layers, MeasurementLayer};
pub use shots::{read_csv, write_csv, LayerShotMatrix};

use rand::Rng;
use rayon::prelude::*;

use crate::bell::{check_test_params, Evidence, TestVerdict};
use crate::error::{Error, Result};
use crate::estimate::{median, median_of_means_batches, mean_report, sample_variance, EstimateReport};
use crate::majorana::{bilinear, majorana_pairs};
use crate::qstate::{measure_pauli, BasisSampler, PureState, State};
use crate::qstate::{expectation, DENSE_PURE_LIMIT};
use crate::rng::{split, SimRng};

/// Above this register size, layer shots are simulated one projection at a
/// time instead of from a precomputed joint outcome table.
const JOINT_TABLE_MAX_MODES: usize = 8;

/// Exact joint outcome distribution of a layer on a pure state, obtained by
/// projecting sequentially in `order`. Outcome index bit e (most significant
/// first, observable order of the layer) is set when observable e reads −1.
pub fn joint_distribution(psi: &PureState, layer: &MeasurementLayer, order: &[usize]) -> Vec<f64> {
    let n = layer.observables.len();
    assert_eq!(order.len(), n);
    let mut probs = vec![0.0; 1 << n];
    let mut stack = vec![(psi.clone(), 0usize, 0usize, 1.0f64)];
    while let Some((branch, depth, outcome, weight)) = stack.pop() {
        if weight < 1e-300 {
            continue;
        }
        if depth == n {
            probs[outcome] += weight;
            continue;
        }
        let e = order[depth];
        for (sign, bit) in [(1i8, 0usize), (-1i8, 1usize)] {
            let (proj, w) = crate::qstate::project_pure_unnormalized(&branch, &layer.observables[e], sign);
            if w <= 0.0 {
                continue;
            }
            let scale = 1.0 / w.sqrt();
            let normalized = PureState::from_raw_scaled(proj, scale);
            stack.push((normalized, depth + 1, outcome | (bit << (n - 1 - e)), weight * w));
        }
    }
    probs
}

fn outcome_to_signs(outcome: usize, n: usize) -> Vec<i8> {
    (0..n).map(|e| if outcome >> (n - 1 - e) & 1 == 1 { -1 } else { 1 }).collect()
}

/// One joint shot of a layer by sequential projective measurement with
/// collapse. Mixed states are first resolved into a spectral component.
pub fn sample_layer(state: &State, layer: &MeasurementLayer, rng: &mut SimRng) -> Result<Vec<i8>> {
    if layer.n_modes() != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: layer.n_modes() });
    }
    let mut current: State = match state {
        State::Pure(_) => state.clone(),
        State::Mixed(_) => {
            let comps = state.components();
            let pick = BasisSampler::new(&comps.iter().map(|c| c.probability).collect::<Vec<_>>()).sample(rng);
            State::Pure(comps[pick].state.clone())
        }
    };
    let mut out = Vec::with_capacity(layer.observables.len());
    for obs in &layer.observables {
        let (o, post) = measure_pauli(&current, obs, rng)?;
        out.push(o);
        current = post;
    }
    Ok(out)
}

/// Reusable sampler for repeated shots of all layers on one state.
pub struct LayerSampler<'a> {
    state: &'a State,
    layers: Vec<MeasurementLayer>,
    weights: BasisSampler,
    components: Vec<PureState>,
    /// tables[ℓ][component]
    tables: Option<Vec<Vec<BasisSampler>>>,
}

impl<'a> LayerSampler<'a> {
    pub fn new(state: &'a State) -> Result<Self> {
        let n = state.n_qubits();
        if n > DENSE_PURE_LIMIT {
            return Err(Error::SizeCap { what: "layer sampling", n, limit: DENSE_PURE_LIMIT });
        }
        let layers = build_layers(n);
        let comps = state.components();
        let weights = BasisSampler::new(&comps.iter().map(|c| c.probability).collect::<Vec<_>>());
        let components: Vec<PureState> = comps.into_iter().map(|c| c.state).collect();
        let tables = (n <= JOINT_TABLE_MAX_MODES).then(|| {
            let order: Vec<usize> = (0..n).collect();
            layers
                .iter()
                .map(|layer| {
                    components
                        .iter()
                        .map(|c| BasisSampler::new(&joint_distribution(c, layer, &order)))
                        .collect()
                })
                .collect()
        });
        Ok(LayerSampler { state, layers, weights, components, tables })
    }

    pub fn layers(&self) -> &[MeasurementLayer] {
        &self.layers
    }

    pub fn shot(&self, layer: usize, rng: &mut SimRng) -> Result<Vec<i8>> {
        let n = self.state.n_qubits();
        match &self.tables {
            Some(t) => {
                let c = self.weights.sample(rng);
                Ok(outcome_to_signs(t[layer][c].sample(rng), n))
            }
            None => {
                let c = self.weights.sample(rng);
                sample_layer(&State::Pure(self.components[c].clone()), &self.layers[layer], rng)
            }
        }
    }

    pub fn shots(&self, layer: usize, m: usize, rng: &mut SimRng) -> Result<LayerShotMatrix> {
        let outcomes = (0..m).map(|_| self.shot(layer, rng)).collect::<Result<Vec<_>>>()?;
        Ok(LayerShotMatrix { layer: self.layers[layer].index, outcomes })
    }

    /// n − Σ_ℓ Ŝ_ℓ from one fresh batch of `m` shots per layer.
    pub fn faf1_once(&self, m: usize, rng: &mut SimRng) -> Result<f64> {
        let n = self.state.n_qubits() as f64;
        let mut total = 0.0;
        for l in 0..self.layers.len() {
            total += u_statistic(&self.shots(l, m, rng)?)?;
        }
        Ok(n - total)
    }
}

/// Ŝ = C(M,2)⁻¹ Σ_{r<s} Σ_e X_r^e X_s^e = (‖column sums‖² − M n) / (M (M − 1)).
pub fn u_statistic(shots: &LayerShotMatrix) -> Result<f64> {
    let m = shots.outcomes.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!("U-statistic needs at least 2 shots, got {m}")));
    }
    let n = shots.outcomes[0].len();
    let mut col = vec![0i64; n];
    for row in &shots.outcomes {
        if row.len() != n {
            return Err(Error::Dimension { expected: n, got: row.len() });
        }
        for (c, &x) in col.iter_mut().zip(row) {
            *c += x as i64;
        }
    }
    let sq: i64 = col.iter().map(|c| c * c).sum();
    Ok((sq - (m * n) as i64) as f64 / (m * (m - 1)) as f64)
}

/// Repetitions are independent runs of the whole layer sweep; the estimate is
/// their median and the standard error their spread over √reps.
pub fn estimate_faf1_single(state: &State, shots_per_layer: usize, delta: f64, rng: &mut SimRng) -> Result<EstimateReport> {
    if shots_per_layer < 2 {
        return Err(Error::InvalidArgument("at least 2 shots per layer are required".into()));
    }
    let reps = median_of_means_batches(delta)?;
    let sampler = LayerSampler::new(state)?;
    let values = split(rng, reps)
        .into_par_iter()
        .map(|mut r| sampler.faf1_once(shots_per_layer, &mut r))
        .collect::<Result<Vec<f64>>>()?;
    let n = state.n_qubits();
    Ok(EstimateReport {
        mean: median(&values),
        std_error: (sample_variance(&values) / reps as f64).sqrt(),
        n_shots: reps * (2 * n - 1) * shots_per_layer,
        n_batches: reps,
        raw_batch_means: Some(values),
        seed: None,
        warning: None,
    })
}

/// Shots per layer so that one repetition has Var ≤ 4n²/M + 4n³/M² ≤ η²/4.
pub fn single_copy_shots_per_layer(n: usize, eta: f64) -> usize {
    let nf = n as f64;
    let e2 = eta * eta;
    let m = (4.0 * nf * nf + (16.0 * nf.powi(4) + 4.0 * e2 * nf.powi(3)).sqrt()) * 2.0 / e2;
    (m.ceil() as usize).max(2)
}

/// Estimates FAF₁ to accuracy ε²/2 and accepts iff the estimate is below ε².
pub fn single_copy_test(state: &State, epsilon: f64, delta: f64, rng: &mut SimRng) -> Result<TestVerdict> {
    check_test_params(epsilon, delta)?;
    let n = state.n_qubits();
    let eta = epsilon * epsilon / 2.0;
    let m = single_copy_shots_per_layer(n, eta);
    let report = estimate_faf1_single(state, m, delta, rng)?;
    let threshold = epsilon * epsilon;
    Ok(TestVerdict {
        accept: report.mean < threshold,
        n_shots_used: report.n_shots,
        n_shots_budget: report.n_shots,
        epsilon,
        delta,
        evidence: Some(Evidence::Estimate { value: report.mean, std_error: report.std_error, threshold }),
    })
}

/// Baseline: per trial pick a uniformly random pair (a, b), measure B_ab once
/// on each of two fresh copies, and record Z = N_b·X·Y. Returns n − mean(Z).
pub fn randomized_pair_estimate(state: &State, n_trials: usize, rng: &mut SimRng) -> Result<EstimateReport> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
    }
    let n = state.n_qubits();
    let pairs: Vec<(usize, usize)> = majorana_pairs(n).collect();
    let nb = pairs.len();
    // A single projective shot of B is ±1 with Pr[+1] = (1 + ⟨B⟩)/2.
    let plus_prob = pairs
        .iter()
        .map(|&(a, b)| Ok((1.0 + expectation(state, &bilinear(a, b, n)?)?) / 2.0))
        .collect::<Result<Vec<f64>>>()?;
    let shot = |p: f64, r: &mut SimRng| if r.random::<f64>() < p { 1.0 } else { -1.0 };
    let values: Vec<f64> = (0..n_trials)
        .map(|_| {
            let k = rng.random_range(0..nb);
            let x = shot(plus_prob[k], rng);
            let y = shot(plus_prob[k], rng);
            n as f64 - nb as f64 * x * y
        })
        .collect();
    mean_report(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::MixedState;
    use crate::rng::seeded;

    #[test]
    fn u_statistic_examples() {
        let all_plus = LayerShotMatrix { layer: 1, outcomes: vec![vec![1; 4]; 10] };
        assert_eq!(u_statistic(&all_plus).unwrap(), 4.0);
        let two = LayerShotMatrix { layer: 1, outcomes: vec![vec![1], vec![-1]] };
        assert_eq!(u_statistic(&two).unwrap(), -1.0);
        let one = LayerShotMatrix { layer: 1, outcomes: vec![vec![1]] };
        assert!(u_statistic(&one).is_err());
    }

    #[test]
    fn u_statistic_matches_pairwise_definition() {
        let mut rng = seeded(8);
        for _ in 0..20 {
            let m = rng.random_range(2..12);
            let n = rng.random_range(1..5);
            let outcomes: Vec<Vec<i8>> = (0..m)
                .map(|_| (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
                .collect();
            let mut acc = 0.0;
            #[allow(clippy::needless_range_loop)]
            for r in 0..m {
                for s in r + 1..m {
                    for e in 0..n {
                        acc += (outcomes[r][e] * outcomes[s][e]) as f64;
                    }
                }
            }
            let direct = acc / (m * (m - 1) / 2) as f64;
            let fast = u_statistic(&LayerShotMatrix { layer: 1, outcomes }).unwrap();
            assert!((direct - fast).abs() < 1e-12);
        }
    }

    fn is_diagonal(a: MajoranaIndexPair) -> bool {
        a.1.get() == a.0.get() + 1 && a.0.get() % 2 == 1
    }

    type MajoranaIndexPair = (crate::majorana::MajoranaIndex, crate::majorana::MajoranaIndex);

    #[test]
    fn vacuum_diagonal_layer_is_deterministic() {
        // Only for n <= 2 does one layer hold every (2j-1, 2j) pair.
        let n = 2;
        let s: State = PureState::zero(n).unwrap().into();
        let layers = build_layers(n);
        let idx = layers
            .iter()
            .position(|l| l.pairs.iter().all(|&p| is_diagonal(p)))
            .expect("diagonal layer exists for n = 2");
        let mut rng = seeded(1);
        for _ in 0..20 {
            assert_eq!(sample_layer(&s, &layers[idx], &mut rng).unwrap(), vec![1; n]);
        }
        let sampler = LayerSampler::new(&s).unwrap();
        for m in [2, 7, 50] {
            assert_eq!(u_statistic(&sampler.shots(idx, m, &mut rng).unwrap()).unwrap(), 2.0);
        }
    }

    #[test]
    fn vacuum_diagonal_observables_read_plus_one() {
        let n = 4;
        let s: State = PureState::zero(n).unwrap().into();
        let layers = build_layers(n);
        assert!(layers.iter().all(|l| !l.pairs.iter().all(|&p| is_diagonal(p))));
        let mut rng = seeded(2);
        for layer in &layers {
            for _ in 0..20 {
                let out = sample_layer(&s, layer, &mut rng).unwrap();
                for (e, &p) in layer.pairs.iter().enumerate() {
                    if is_diagonal(p) {
                        assert_eq!(out[e], 1);
                    }
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_layer_is_uniform() {
        let s: State = MixedState::maximally_mixed(2).unwrap().into();
        for layer in build_layers(2) {
            for comp in s.components() {
                let d = joint_distribution(&comp.state, &layer, &[0, 1]);
                let total: f64 = d.iter().sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
            // average over the spectral mixture
            let comps = s.components();
            let mut avg = [0.0; 4];
            for c in &comps {
                for (a, p) in avg.iter_mut().zip(joint_distribution(&c.state, &layer, &[0, 1])) {
                    *a += c.probability * p;
                }
            }
            assert!(avg.iter().all(|p| (p - 0.25).abs() < 1e-12), "{avg:?}");
        }
    }

    #[test]
    fn shots_per_layer_formula() {
        let m = single_copy_shots_per_layer(4, 0.125);
        let mf = m as f64;
        assert!(4.0 * 16.0 / mf + 4.0 * 64.0 / (mf * mf) <= 0.125f64.powi(2) / 4.0);
        let mf = (m - 1) as f64;
        assert!(4.0 * 16.0 / mf + 4.0 * 64.0 / (mf * mf) > 0.125f64.powi(2) / 4.0);
    }
}
