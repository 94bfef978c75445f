use serde::{Deserialize, Serialize};

use super::detector::Detector;
use super::ids;
use crate::error::{Error, Result};
use crate::models::QuenchScenario;
use crate::stats::{sample_detection, stream_key, two_proportion_test, TestResult, TrialBatch};

/// Alice encodes a bit by quenching (1) or not (0) the first half of `n_total`
/// systems; Charlie compares detection rates of the two halves at distance `l`
/// after waiting `delta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalingConfig {
    pub l: f64,
    pub detector_width: f64,
    pub n_total: u64,
    pub delta_t: f64,
    pub bit: u8,
    pub alpha: f64,
}

impl SignalingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_total < 2 || !self.n_total.is_multiple_of(2) {
            return Err(Error::param(
                "n_total",
                format!("N = {} must be even and at least 2", self.n_total),
            ));
        }
        if !(self.delta_t.is_finite() && self.delta_t > 0.0) {
            return Err(Error::param(
                "delta_t",
                format!("{} must be positive", self.delta_t),
            ));
        }
        if self.bit > 1 {
            return Err(Error::param("bit", format!("{} is not 0 or 1", self.bit)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(
                "alpha",
                format!("{} must lie in (0, 1)", self.alpha),
            ));
        }
        Ok(())
    }
}

/// Detection probabilities for both halves, computed once and reused across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingSetup {
    pub config: SignalingConfig,
    pub detector: Detector,
    pub c_sim: f64,
    /// Probability at the detector for a quenched system at `t1 + delta_t`.
    pub p_quenched: f64,
    /// Probability at the detector for an unquenched system.
    pub p_unquenched: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingOutcome {
    pub seed: u64,
    pub bit: u8,
    pub test: TestResult,
    pub decoded_bit: u8,
    /// Bit 1 decoded from a bit-1 quench across a spacelike separation `l > c·Δt`.
    pub superluminal: bool,
    pub first_half: TrialBatch,
    pub second_half: TrialBatch,
}

impl SignalingSetup {
    pub fn new(scenario: &QuenchScenario, config: SignalingConfig) -> Result<Self> {
        config.validate()?;
        let detector = Detector::at_distance(scenario.well().x_a, config.l, config.detector_width);
        detector.validate(scenario.grid())?;
        let t = scenario.well().t1 + config.delta_t;
        let p_quenched = detector.probability(&scenario.state_at(t)?)?;
        let p_unquenched = detector.probability(scenario.psi0())?;
        Ok(SignalingSetup {
            config,
            detector,
            c_sim: scenario.c_sim(),
            p_quenched,
            p_unquenched,
        })
    }

    pub fn spacelike(&self) -> bool {
        self.config.l > self.c_sim * self.config.delta_t
    }

    /// Runs the protocol for Alice's `bit`, overriding the configured one.
    pub fn run_bit(&self, bit: u8, seed: u64) -> Result<SignalingOutcome> {
        if bit > 1 {
            return Err(Error::param("bit", format!("{bit} is not 0 or 1")));
        }
        let half = self.config.n_total / 2;
        let p_first = if bit == 1 {
            self.p_quenched
        } else {
            self.p_unquenched
        };
        let first_half = sample_detection(p_first, half, seed, stream_key(ids::SIGNALING, 0, 0))?;
        let second_half = sample_detection(
            self.p_unquenched,
            half,
            seed,
            stream_key(ids::SIGNALING, 1, 0),
        )?;
        let test = two_proportion_test(&first_half, &second_half, self.config.alpha)?;
        let decoded_bit = test.significant as u8;
        Ok(SignalingOutcome {
            seed,
            bit,
            test,
            decoded_bit,
            superluminal: bit == 1 && decoded_bit == 1 && self.spacelike(),
            first_half,
            second_half,
        })
    }

    pub fn run(&self, seed: u64) -> Result<SignalingOutcome> {
        self.run_bit(self.config.bit, seed)
    }
}

pub fn run_signaling(
    scenario: &QuenchScenario,
    config: SignalingConfig,
    seed: u64,
) -> Result<SignalingOutcome> {
    SignalingSetup::new(scenario, config)?.run(seed)
}

/// Plug-in estimate, in bits, of the mutual information between sent and decoded bits.
pub fn mutual_information_bits(pairs: &[(u8, u8)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let mut joint = [[0.0f64; 2]; 2];
    for &(a, b) in pairs {
        joint[(a & 1) as usize][(b & 1) as usize] += 1.0;
    }
    let n = pairs.len() as f64;
    let pa = [
        (joint[0][0] + joint[0][1]) / n,
        (joint[1][0] + joint[1][1]) / n,
    ];
    let pb = [
        (joint[0][0] + joint[1][0]) / n,
        (joint[0][1] + joint[1][1]) / n,
    ];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let p = joint[a][b] / n;
            if p > 0.0 {
                mi += p * (p / (pa[a] * pb[b])).log2();
            }
        }
    }
    mi.max(0.0)
}
