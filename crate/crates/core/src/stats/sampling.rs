use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::trial_rng;
use crate::error::{Error, Result};

/// Where a batch's random numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
    pub n_trials: u64,
}

/// Detection counts from a set of Bernoulli trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub n_trials: u64,
    pub n_hits: u64,
    pub provenance: Vec<Provenance>,
}

impl TrialBatch {
    pub fn p_hat(&self) -> f64 {
        self.n_hits as f64 / self.n_trials as f64
    }

    /// Pools two batches; hits, trials and provenance add.
    pub fn merge(&self, other: &TrialBatch) -> TrialBatch {
        let mut provenance = self.provenance.clone();
        provenance.extend_from_slice(&other.provenance);
        TrialBatch {
            n_trials: self.n_trials + other.n_trials,
            n_hits: self.n_hits + other.n_hits,
            provenance,
        }
    }
}

/// `n` independent detections with probability `p`, drawn from stream `stream` of `seed`.
/// Trial `i` hits when its uniform draw `uᵢ ∈ [0, 1)` is below `p`.
pub fn sample_detection(p: f64, n: u64, seed: u64, stream: u64) -> Result<TrialBatch> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("probability {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::param("n", "at least one trial is required"));
    }
    let mut rng = trial_rng(seed, stream);
    let mut hits = 0u64;
    for _ in 0..n {
        let u: f64 = rng.random();
        hits += (u < p) as u64;
    }
    Ok(TrialBatch {
        n_trials: n,
        n_hits: hits,
        provenance: vec![Provenance {
            seed,
            stream,
            n_trials: n,
        }],
    })
}
