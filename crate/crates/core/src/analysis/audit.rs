use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::QuenchScenario;

/// Squared norm of a model's state over a set of sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAudit {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub max_defect: f64,
}

impl NormAudit {
    /// Largest `|‖ψ‖² − 1|` among samples at or after `t`.
    pub fn max_defect_after(&self, t: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.norms)
            .filter(|(s, _)| **s >= t)
            .map(|(_, n)| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `time,norm_sqr,defect`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,norm_sqr,defect\n");
        for (t, n) in self.times.iter().zip(&self.norms) {
            s.push_str(&format!("{t},{n},{}\n", (n - 1.0).abs()));
        }
        s
    }
}

/// Quadrature norm of `scenario.state_at(t)` at each of `times`.
///
/// Times must be strictly increasing and not earlier than the quench.
pub fn normalization_audit(scenario: &QuenchScenario, times: &[f64]) -> Result<NormAudit> {
    if times.is_empty() {
        return Err(Error::param(
            "times",
            "at least one sample time is required",
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "times",
            "sample times must be strictly increasing",
        ));
    }
    let t1 = scenario.well().t1;
    if times[0] < t1 {
        return Err(Error::param(
            "times",
            format!("first sample {} precedes the quench at t1 = {t1}", times[0]),
        ));
    }
    let norms: Vec<f64> = scenario
        .trajectory(times)?
        .iter()
        .map(|s| s.norm_sqr())
        .collect();
    let max_defect = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    Ok(NormAudit {
        times: times.to_vec(),
        norms,
        max_defect,
    })
}
