use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::sampling::TrialBatch;
use crate::error::{Error, Result};

/// Outcome of a two-sided test at significance `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub z_statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
}

/// Pooled two-proportion z-test of `a` against `b`.
///
/// `z = (p̂ₐ − p̂_b) / √(p̂(1 − p̂)(1/nₐ + 1/n_b))` with `p̂` the pooled rate;
/// the two-sided p-value is `erfc(|z|/√2)`. When the pooled rate is 0 or 1
/// the samples are identical and the test reports `z = 0`, `p = 1`.
pub fn two_proportion_test(a: &TrialBatch, b: &TrialBatch, alpha: f64) -> Result<TestResult> {
    if a.n_trials == 0 || b.n_trials == 0 {
        return Err(Error::param(
            "batch",
            "both batches need at least one trial",
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(
            "alpha",
            format!("alpha = {alpha} must lie in (0, 1)"),
        ));
    }
    let (na, nb) = (a.n_trials as f64, b.n_trials as f64);
    let pooled = (a.n_hits + b.n_hits) as f64 / (na + nb);
    let var = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
    let z = if var > 0.0 {
        (a.p_hat() - b.p_hat()) / var.sqrt()
    } else {
        0.0
    };
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(TestResult {
        z_statistic: z,
        p_value,
        alpha,
        significant: p_value < alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(hits: u64, n: u64) -> TrialBatch {
        TrialBatch {
            n_trials: n,
            n_hits: hits,
            provenance: Vec::new(),
        }
    }

    #[test]
    fn identical_batches_are_not_significant() {
        let r = two_proportion_test(&batch(500, 1000), &batch(500, 1000), 0.01).unwrap();
        assert_eq!(r.z_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn degenerate_pool() {
        let r = two_proportion_test(&batch(0, 10), &batch(0, 20), 0.01).unwrap();
        assert_eq!((r.z_statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn rejects_empty_batches() {
        assert!(two_proportion_test(&batch(0, 0), &batch(1, 2), 0.01).is_err());
    }

    #[test]
    fn known_z_gives_known_p() {
        // z = 1.959964 is the two-sided 5% point.
        let p = erfc(1.959_963_984_540_054 / std::f64::consts::SQRT_2);
        assert!((p - 0.05).abs() < 1e-9, "{p}");
    }
}
