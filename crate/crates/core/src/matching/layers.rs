use serde::{Deserialize, Serialize};

use crate::majorana::{bilinear, MajoranaIndex};
use crate::qstate::PauliString;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementLayer {
    /// 1-based layer number ℓ.
    pub index: usize,
    /// n pairs (a < b), mode-disjoint.
    pub pairs: Vec<(MajoranaIndex, MajoranaIndex)>,
    /// B_ab for each pair, in the same order.
    pub observables: Vec<PauliString>,
}

impl MeasurementLayer {
    pub fn n_modes(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs_raw(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(a, b)| (a.get(), b.get())).collect()
    }
}

/// Layers ℓ = 1..2n−1: {(ℓ, 2n)} ∪ {ord([ℓ+j]_m, [ℓ−j]_m) : j = 1..n−1}
/// with m = 2n − 1 and [x]_m = 1 + ((x − 1) mod m).
pub fn build_layers(n: usize) -> Vec<MeasurementLayer> {
    assert!(n >= 1, "need at least one mode");
    let m = (2 * n - 1) as i64;
    let wrap = |x: i64| 1 + (x - 1).rem_euclid(m);
    (1..=m)
        .map(|l| {
            let mut raw = vec![(l, 2 * n as i64)];
            for j in 1..n as i64 {
                let (a, b) = (wrap(l + j), wrap(l - j));
                raw.push((a.min(b), a.max(b)));
            }
            let pairs: Vec<(MajoranaIndex, MajoranaIndex)> = raw
                .into_iter()
                .map(|(a, b)| {
                    (
                        MajoranaIndex::new(a as usize, n).expect("index in range"),
                        MajoranaIndex::new(b as usize, n).expect("index in range"),
                    )
                })
                .collect();
            let observables = pairs
                .iter()
                .map(|&(a, b)| bilinear(a.get(), b.get(), n).expect("distinct indices"))
                .collect();
            MeasurementLayer { index: l as usize, pairs, observables }
        })
        .collect()
}
