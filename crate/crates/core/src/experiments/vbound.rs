use serde::{Deserialize, Serialize};

use super::detector::Detector;
use super::ids;
use crate::error::{Error, Result};
use crate::models::QuenchScenario;
use crate::stats::{sample_detection, stream_key, two_proportion_test, TestResult};

/// One step of the increasing-wait loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VBoundStep {
    /// Absolute sample time.
    pub t_s: f64,
    pub p_hat: f64,
    pub test: TestResult,
    /// `L′ / (t_s − t1)`, emitted while `p_s` is still equal to `p0`.
    pub upper_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VBoundReport {
    pub l_prime: f64,
    pub p0_hat: f64,
    pub steps: Vec<VBoundStep>,
    pub first_significant_t_s: Option<f64>,
    /// Lower end of the bracket on the response speed.
    pub v_lower: f64,
    /// Upper end; `None` when the first step already responded.
    pub v_upper: Option<f64>,
    pub no_transition_observed: bool,
}

impl VBoundReport {
    /// True when `v` lies in `[v_lower, v_upper)`.
    pub fn brackets(&self, v: f64) -> bool {
        v >= self.v_lower && self.v_upper.is_none_or(|u| v < u)
    }

    pub fn bounds(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.upper_bound).collect()
    }
}

/// Waits progressively longer after the quench until the detector rate
/// departs from its pre-quench value.
///
/// Each non-significant step at elapsed time `e = t_s − t1` gives `v < L′/e`.
/// The first significant step at `e_j` shows the response arrived by then,
/// so `v ≥ L′/e_j`; the bracket is `[L′/e_j, L′/e_{j−1})`, open above when
/// the very first step is already significant. Sampling stops there.
pub fn estimate_v_bound(
    scenario: &QuenchScenario,
    detector: Detector,
    l_prime: f64,
    t_s_schedule: &[f64],
    n: u64,
    seed: u64,
    alpha: f64,
) -> Result<VBoundReport> {
    if t_s_schedule.is_empty() {
        return Err(Error::param("t_s_schedule", "schedule must not be empty"));
    }
    if t_s_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_s_schedule", "must be strictly increasing"));
    }
    if !(l_prime.is_finite() && l_prime > 0.0) {
        return Err(Error::param(
            "l_prime",
            format!("L' = {l_prime} must be positive"),
        ));
    }
    let t1 = scenario.well().t1;
    if t_s_schedule[0] <= t1 {
        return Err(Error::param(
            "t_s_schedule",
            format!("every t_s must exceed t1 = {t1}; got {}", t_s_schedule[0]),
        ));
    }
    detector.validate(scenario.grid())?;
    let p0 = detector.probability(scenario.psi0())?;
    let base = sample_detection(p0, n, seed, stream_key(ids::VBOUND, 0, 0))?;
    let states = scenario.trajectory(t_s_schedule)?;
    let mut steps = Vec::new();
    let mut first = None;
    for (j, (state, &t_s)) in states.iter().zip(t_s_schedule).enumerate() {
        let p = detector.probability(state)?;
        let batch = sample_detection(p, n, seed, stream_key(ids::VBOUND, 1, j as u64))?;
        let test = two_proportion_test(&batch, &base, alpha)?;
        let elapsed = t_s - t1;
        steps.push(VBoundStep {
            t_s,
            p_hat: batch.p_hat(),
            test,
            upper_bound: (!test.significant).then(|| l_prime / elapsed),
        });
        if test.significant {
            first = Some(j);
            break;
        }
    }
    let elapsed = |j: usize| t_s_schedule[j] - t1;
    let (v_lower, v_upper) = match first {
        Some(0) => (l_prime / elapsed(0), None),
        Some(j) => (l_prime / elapsed(j), Some(l_prime / elapsed(j - 1))),
        None => (0.0, Some(l_prime / elapsed(t_s_schedule.len() - 1))),
    };
    Ok(VBoundReport {
        l_prime,
        p0_hat: base.p_hat(),
        steps,
        first_significant_t_s: first.map(|j| t_s_schedule[j]),
        v_lower,
        v_upper,
        no_transition_observed: first.is_none(),
    })
}
