//! Median-of-means aggregation and the report types shared by the estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub std_error: f64,
    pub n_shots: usize,
    pub n_batches: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_batch_means: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl EstimateReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// |mean − target| in units of the reported standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let dev = (self.mean - target).abs();
        if self.std_error > 0.0 {
            dev / self.std_error
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// ⌈8 ln(1/δ)⌉, at least one batch.
pub fn median_of_means_batches(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(((8.0 * (1.0 / delta).ln()).ceil() as usize).max(1))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Splits `values` into `n_batches` equal batches (remainder discarded) and
/// returns the median of the batch means. The standard error is the spread of
/// the batch means over √(batches); with a single batch it falls back to the
/// per-sample spread.
pub fn median_of_means(values: &[f64], n_batches: usize) -> Result<EstimateReport> {
    if n_batches == 0 || values.len() < n_batches {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot fill {n_batches} batches",
            values.len()
        )));
    }
    let size = values.len() / n_batches;
    let usable = &values[..size * n_batches];
    let batch_means: Vec<f64> = usable.chunks(size).map(mean).collect();
    let (centre, std_error) = if n_batches == 1 {
        (batch_means[0], (sample_variance(usable) / usable.len() as f64).sqrt())
    } else {
        (median(&batch_means), (sample_variance(&batch_means) / n_batches as f64).sqrt())
    };
    Ok(EstimateReport {
        mean: centre,
        std_error,
        n_shots: usable.len(),
        n_batches,
        raw_batch_means: Some(batch_means),
        seed: None,
        warning: None,
    })
}

/// Plain mean with standard error √(s²/N).
pub fn mean_report(values: &[f64]) -> Result<EstimateReport> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    Ok(EstimateReport {
        mean: mean(values),
        std_error: (sample_variance(values) / values.len() as f64).sqrt(),
        n_shots: values.len(),
        n_batches: 1,
        raw_batch_means: None,
        seed: None,
        warning: None,
    })
}
