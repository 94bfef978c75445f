use serde::{Deserialize, Serialize};

use super::detector::Detector;
use super::ids;
use crate::error::{Error, Result};
use crate::models::{QuenchScenario, ResponseModel};
use crate::stats::{sample_detection, stream_key, two_proportion_test, TestResult, TrialBatch};
use crate::well::WellConfig;

/// Timing and sampling of the three-phase protocol.
///
/// `p0` is sampled before the quench, `px` at `t1 + t_x` and `py` at
/// `t1 + t_y`; an optional `ps` at `t1 + t_s` feeds the speed bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub l: f64,
    pub detector_width: f64,
    pub t_x: f64,
    pub t_y: f64,
    #[serde(default)]
    pub t_s: Option<f64>,
    pub n_per_phase: u64,
    pub alpha: f64,
}

impl ProtocolConfig {
    /// Enforces `t_x < l/c` and `l/c < t_y < L/c`.
    pub fn validate(&self, c_sim: f64, well_width: f64) -> Result<()> {
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::param("l", format!("{} must be positive", self.l)));
        }
        if self.n_per_phase == 0 {
            return Err(Error::param("n_per_phase", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(
                "alpha",
                format!("{} must lie in (0, 1)", self.alpha),
            ));
        }
        let l_c = self.l / c_sim;
        let big_l_c = well_width / c_sim;
        if !(self.t_x > 0.0 && self.t_x < l_c) {
            return Err(Error::Constraint(format!(
                "t_x < l/c: need 0 < t_x < {l_c}, got t_x = {}",
                self.t_x
            )));
        }
        if !(self.t_y > l_c && self.t_y < big_l_c) {
            return Err(Error::Constraint(format!(
                "l/c < t_y < L/c: need {l_c} < t_y < {big_l_c}, got t_y = {}",
                self.t_y
            )));
        }
        if let Some(t_s) = self.t_s {
            if !(t_s.is_finite() && t_s > 0.0) {
                return Err(Error::param("t_s", format!("{t_s} must be positive")));
            }
        }
        Ok(())
    }
}

/// Estimated detection probability of one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub time: f64,
    pub p_hat: f64,
    /// Probability the model assigns at the detector; the sampler's input.
    pub p_model: f64,
    pub batch: TrialBatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTests {
    pub p0_vs_px: TestResult,
    pub p0_vs_py: TestResult,
    pub px_vs_py: TestResult,
    #[serde(default)]
    pub p0_vs_ps: Option<TestResult>,
}

/// Classification of the significance pattern of `(p0, px, py)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `p0 ≠ px`: the detector responds before light could arrive.
    RelativityViolating,
    /// `p0 = px ≠ py`: a partial, front-like response.
    QmViolating,
    /// `p0 = px = py`: no response inside the window.
    DiscretenessConsistent,
    /// Any other pattern, e.g. `p0 = px`, `p0 ≠ py`, `px = py`.
    Inconclusive,
}

/// Applies the decision table; "equal" means the test is not significant.
pub fn verdict_from_tests(
    p0_vs_px: &TestResult,
    p0_vs_py: &TestResult,
    px_vs_py: &TestResult,
) -> Verdict {
    let eq_0x = !p0_vs_px.significant;
    let eq_0y = !p0_vs_py.significant;
    let eq_xy = !px_vs_py.significant;
    if !eq_0x {
        Verdict::RelativityViolating
    } else if !eq_0y && !eq_xy {
        Verdict::QmViolating
    } else if eq_0y && eq_xy {
        Verdict::DiscretenessConsistent
    } else {
        Verdict::Inconclusive
    }
}

/// Everything needed to replay a protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub well: WellConfig,
    pub model: ResponseModel,
    pub c_sim: f64,
    pub config: ProtocolConfig,
    pub seed: u64,
    pub p0: Estimate,
    pub px: Estimate,
    pub py: Estimate,
    #[serde(default)]
    pub ps: Option<Estimate>,
    pub tests: PairTests,
    pub verdict: Verdict,
}

fn phase(p_model: f64, time: f64, n: u64, seed: u64, index: u64) -> Result<Estimate> {
    let batch = sample_detection(p_model, n, seed, stream_key(ids::PROTOCOL, index, 0))?;
    Ok(Estimate {
        time,
        p_hat: batch.p_hat(),
        p_model,
        batch,
    })
}

/// Model probabilities at the detector for every phase, computed once and
/// reused across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSetup {
    pub well: WellConfig,
    pub model: ResponseModel,
    pub c_sim: f64,
    pub config: ProtocolConfig,
    pub detector: Detector,
    pub p_pre: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_s: Option<f64>,
}

impl ProtocolSetup {
    pub fn new(scenario: &QuenchScenario, config: ProtocolConfig) -> Result<Self> {
        let well = *scenario.well();
        config.validate(scenario.c_sim(), well.width())?;
        let detector = Detector::at_distance(well.x_a, config.l, config.detector_width);
        detector.validate(scenario.grid())?;
        let t1 = well.t1;
        let mut times = vec![t1 + config.t_x, t1 + config.t_y];
        if let Some(t_s) = config.t_s {
            times.push(t1 + t_s);
        }
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| times[i]).collect();
        let states = scenario.trajectory(&sorted)?;
        let mut probs = vec![0.0; times.len()];
        for (k, &i) in order.iter().enumerate() {
            probs[i] = detector.probability(&states[k])?;
        }
        Ok(ProtocolSetup {
            well,
            model: *scenario.model(),
            c_sim: scenario.c_sim(),
            config,
            detector,
            p_pre: detector.probability(scenario.psi0())?,
            p_x: probs[0],
            p_y: probs[1],
            p_s: probs.get(2).copied(),
        })
    }

    /// Samples every phase in its own stream of `seed` and classifies the outcome.
    pub fn run(&self, seed: u64) -> Result<ExperimentReport> {
        let c = &self.config;
        let t1 = self.well.t1;
        let n = c.n_per_phase;
        let p0 = phase(self.p_pre, t1, n, seed, 0)?;
        let px = phase(self.p_x, t1 + c.t_x, n, seed, 1)?;
        let py = phase(self.p_y, t1 + c.t_y, n, seed, 2)?;
        let ps = match (self.p_s, c.t_s) {
            (Some(p), Some(t_s)) => Some(phase(p, t1 + t_s, n, seed, 3)?),
            _ => None,
        };
        let a = c.alpha;
        let tests = PairTests {
            p0_vs_px: two_proportion_test(&p0.batch, &px.batch, a)?,
            p0_vs_py: two_proportion_test(&p0.batch, &py.batch, a)?,
            px_vs_py: two_proportion_test(&px.batch, &py.batch, a)?,
            p0_vs_ps: match &ps {
                Some(e) => Some(two_proportion_test(&p0.batch, &e.batch, a)?),
                None => None,
            },
        };
        let verdict = verdict_from_tests(&tests.p0_vs_px, &tests.p0_vs_py, &tests.px_vs_py);
        Ok(ExperimentReport {
            well: self.well,
            model: self.model,
            c_sim: self.c_sim,
            config: *c,
            seed,
            p0,
            px,
            py,
            ps,
            tests,
            verdict,
        })
    }
}

/// Samples `p0`, `px`, `py` (and `ps` when configured) in independent
/// streams and classifies the outcome.
pub fn run_probability_protocol(
    scenario: &QuenchScenario,
    config: ProtocolConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    ProtocolSetup::new(scenario, config)?.run(seed)
}
