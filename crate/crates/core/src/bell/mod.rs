//! Two-copy Bell protocol: readout post-processing, unbiased estimators of
//! FAF₁, purity, the purity-corrected witness and Fock-basis coherence, and the
//! one-sided Gaussianity tester.

mod record;
mod sampler;

pub use record::{read_ndjson, write_ndjson, BellRecordLine};
pub use sampler::{bell_distribution, bell_record, bell_sample, BellSampler, BELL_MAX_MODES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    mean, mean_report, median_of_means, median_of_means_batches, sample_covariance, sample_variance,
    EstimateReport,
};
use crate::majorana::witness_from_parts;
use crate::qstate::{Bits, State};
use crate::rng::SimRng;

/// g_{2j−1} = (−1)^{u_j + Σ_{k<j} v_k},  g_{2j} = −(−1)^{u_j + v_j + Σ_{k<j} v_k}.
pub fn bits_to_g(u: &Bits, v: &Bits) -> Result<Vec<i8>> {
    if u.n != v.n {
        return Err(Error::Dimension { expected: u.n, got: v.n });
    }
    let sign = |parity: u8| if parity.is_multiple_of(2) { 1i8 } else { -1i8 };
    let mut prefix = 0u8;
    let mut g = Vec::with_capacity(2 * u.n);
    for j in 0..u.n {
        let (uj, vj) = (u.get(j), v.get(j));
        g.push(sign(uj + prefix));
        g.push(-sign(uj + vj + prefix));
        prefix = (prefix + vj) % 2;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellSample {
    pub u: Bits,
    pub v: Bits,
    pub g: Vec<i8>,
    /// ½ Σ_a g_a
    pub q: i32,
    /// 2q²
    pub lambda: u32,
    /// (−1)^{u·v}, the swap eigenvalue.
    pub swap: i8,
    pub v_is_zero: bool,
}

impl BellSample {
    pub fn from_bits(u: Bits, v: Bits) -> Self {
        let g = bits_to_g(&u, &v).expect("equal lengths");
        let q = g.iter().map(|&x| x as i32).sum::<i32>() / 2;
        let swap = if (u.value & v.value).count_ones().is_multiple_of(2) { 1 } else { -1 };
        BellSample { u, v, g, q, lambda: (2 * q * q) as u32, swap, v_is_zero: v.is_zero() }
    }

    pub fn n_modes(&self) -> usize {
        self.u.n
    }

    /// Recomputes the derived fields from (u, v) and compares.
    pub fn is_consistent(&self) -> bool {
        *self == BellSample::from_bits(self.u, self.v)
    }
}

/// Median-of-means FAF₁ estimate from λ values of an existing record.
pub fn faf1_from_samples(samples: &[BellSample], delta: f64) -> Result<EstimateReport> {
    let batches = median_of_means_batches(delta)?;
    let lambdas: Vec<f64> = samples.iter().map(|s| s.lambda as f64).collect();
    median_of_means(&lambdas, batches)
}

pub fn estimate_faf1_bell(state: &State, n_shots: usize, delta: f64, rng: &mut SimRng) -> Result<EstimateReport> {
    let batches = median_of_means_batches(delta)?;
    if n_shots < batches {
        return Err(Error::InvalidArgument(format!("{n_shots} shots cannot fill {batches} batches")));
    }
    let samples = bell_record(state, n_shots, rng)?;
    faf1_from_samples(&samples, delta)
}

/// Mean swap eigenvalue, an unbiased estimate of tr(ρ²).
pub fn estimate_purity_bell(samples: &[BellSample]) -> Result<EstimateReport> {
    let swaps: Vec<f64> = samples.iter().map(|s| s.swap as f64).collect();
    mean_report(&swaps)
}

/// Witness from one shared record: FAF₁ (median of means) minus the purity
/// penalty evaluated at the mean swap value clamped to [2^−n, 1]. The standard
/// error is propagated to first order from the per-shot (λ, swap) covariance.
pub fn witness_from_samples(samples: &[BellSample], delta: f64) -> Result<EstimateReport> {
    let n = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("no samples".into()))?
        .n_modes();
    let faf = faf1_from_samples(samples, delta)?;
    let usable = &samples[..faf.n_shots];
    let lambdas: Vec<f64> = usable.iter().map(|s| s.lambda as f64).collect();
    let swaps: Vec<f64> = usable.iter().map(|s| s.swap as f64).collect();
    let raw_purity = mean(&swaps);
    let floor = 0.5f64.powi(n as i32);
    let purity = raw_purity.clamp(floor, 1.0);
    let warning = (raw_purity < floor).then(|| {
        format!("degenerate purity estimate {raw_purity:.6} clamped to 2^-n = {floor:.6}")
    });
    let value = witness_from_parts(faf.mean, purity, n);

    // dW/dP = 2 P^{1/n − 1}
    let slope = 2.0 * purity.powf(1.0 / n as f64 - 1.0);
    let m = lambdas.len() as f64;
    let var = faf.std_error.powi(2)
        + slope * slope * sample_variance(&swaps) / m
        + 2.0 * slope * sample_covariance(&lambdas, &swaps) / m;
    Ok(EstimateReport {
        mean: value,
        std_error: var.max(0.0).sqrt(),
        n_shots: faf.n_shots,
        n_batches: faf.n_batches,
        raw_batch_means: None,
        seed: None,
        warning,
    })
}

pub fn estimate_witness_bell(state: &State, n_shots: usize, delta: f64, rng: &mut SimRng) -> Result<EstimateReport> {
    let samples = bell_record(state, n_shots, rng)?;
    witness_from_samples(&samples, delta)
}

/// Mean of swap − 1[v = 0ⁿ], an unbiased estimate of tr(ρ²) − tr(Δ(ρ)²).
pub fn estimate_coherence_bell(samples: &[BellSample]) -> Result<EstimateReport> {
    let xs: Vec<f64> = samples
        .iter()
        .map(|s| s.swap as f64 - if s.v_is_zero { 1.0 } else { 0.0 })
        .collect();
    mean_report(&xs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    BellShot { index: usize, sample: BellSample },
    Estimate { value: f64, std_error: f64, threshold: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub accept: bool,
    pub n_shots_used: usize,
    /// Shot budget the tester was allowed.
    pub n_shots_budget: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub evidence: Option<Evidence>,
}

/// ⌈(n²/ε²) ln(1/δ)⌉ shots, enough for Pr[λ ≠ 0] ≥ ε²/n² to show up with probability ≥ 1 − δ.
pub fn bell_test_shots(n: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_test_params(epsilon, delta)?;
    let nf = n as f64;
    Ok(((nf * nf / (epsilon * epsilon)) * (1.0 / delta).ln()).ceil() as usize)
}

pub(crate) fn check_test_params(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

/// One-sided tester: rejects on the first shot with λ ≠ 0.
pub fn bell_gaussianity_test(state: &State, epsilon: f64, delta: f64, rng: &mut SimRng) -> Result<TestVerdict> {
    let budget = bell_test_shots(state.n_qubits(), epsilon, delta)?;
    let sampler = BellSampler::new(state)?;
    for index in 0..budget {
        let sample = sampler.sample(rng);
        if sample.lambda != 0 {
            return Ok(TestVerdict {
                accept: false,
                n_shots_used: index + 1,
                n_shots_budget: budget,
                epsilon,
                delta,
                evidence: Some(Evidence::BellShot { index, sample }),
            });
        }
    }
    Ok(TestVerdict {
        accept: true,
        n_shots_used: budget,
        n_shots_budget: budget,
        epsilon,
        delta,
        evidence: None,
    })
}
