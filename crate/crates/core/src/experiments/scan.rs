use serde::{Deserialize, Serialize};

use super::detector::Detector;
use super::ids;
use crate::error::{Error, Result};
use crate::models::QuenchScenario;
use crate::stats::{sample_detection, stream_key, two_proportion_test};

/// One detector position at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub position: f64,
    pub time: f64,
    pub p_hat: f64,
    pub n: u64,
    pub z_vs_baseline: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    /// No position ever differs from its baseline.
    NoChange,
    /// Every responsive position flips between the same two adjacent samples.
    SimultaneousGlobal,
    /// At some sample only part of the responsive positions have flipped.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub kind: ChangeKind,
    /// Positions significant at one or more sample times.
    pub responsive_positions: Vec<f64>,
    /// Sample times at which a strict, non-empty subset of responsive positions is significant.
    pub partial_times: Vec<f64>,
    /// Time after the quench of the first sample showing any change.
    pub inferred_change_time: Option<f64>,
    /// The pair of adjacent sample times bracketing the first change.
    pub change_interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub positions: Vec<f64>,
    pub times: Vec<f64>,
    pub window_width: f64,
    pub seed: u64,
    pub alpha: f64,
    /// Position-major: cell `(i, j)` is at index `i · times.len() + j`.
    pub cells: Vec<ScanCell>,
    pub summary: ScanSummary,
}

impl ScanTable {
    pub fn cell(&self, position: usize, time: usize) -> &ScanCell {
        &self.cells[position * self.times.len() + time]
    }

    /// CSV with columns `position,time,p_hat,n,z_vs_baseline,significant`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("position,time,p_hat,n,z_vs_baseline,significant\n");
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.position, c.time, c.p_hat, c.n, c.z_vs_baseline, c.significant
            ));
        }
        s
    }
}

fn summarize(sig: &[Vec<bool>], positions: &[f64], times: &[f64], t1: f64) -> ScanSummary {
    let np = positions.len();
    let responsive: Vec<usize> = (0..np).filter(|&i| sig.iter().any(|row| row[i])).collect();
    let count = |row: &Vec<bool>| responsive.iter().filter(|&&i| row[i]).count();
    let partial_times: Vec<f64> = sig
        .iter()
        .zip(times)
        .filter(|(row, _)| {
            let c = count(row);
            c > 0 && c < responsive.len()
        })
        .map(|(_, t)| *t)
        .collect();
    let first = sig.iter().position(|row| row.iter().any(|&b| b));
    let kind = if responsive.is_empty() {
        ChangeKind::NoChange
    } else {
        let full_from_first = first
            .map(|f| sig[f..].iter().all(|row| count(row) == responsive.len()))
            .unwrap_or(false);
        if partial_times.is_empty() && full_from_first {
            ChangeKind::SimultaneousGlobal
        } else {
            ChangeKind::Partial
        }
    };
    ScanSummary {
        kind,
        responsive_positions: responsive.iter().map(|&i| positions[i]).collect(),
        partial_times,
        inferred_change_time: first.map(|f| times[f] - t1),
        change_interval: first.filter(|&f| f > 0).map(|f| (times[f - 1], times[f])),
    }
}

/// Estimates the detection probability at every `(position, time)` pair with
/// `n` trials per cell and tests each against a pre-quench baseline taken at
/// the same position.
pub fn run_detector_scan(
    scenario: &QuenchScenario,
    window_width: f64,
    sample_times: &[f64],
    positions: &[f64],
    n: u64,
    seed: u64,
    alpha: f64,
) -> Result<ScanTable> {
    if sample_times.is_empty() || positions.is_empty() {
        return Err(Error::param(
            "scan",
            "positions and sample times must be non-empty",
        ));
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("sample_times", "must be strictly increasing"));
    }
    let t1 = scenario.well().t1;
    if sample_times[0] < t1 {
        return Err(Error::param(
            "sample_times",
            format!(
                "first sample {} precedes the quench at t1 = {t1}",
                sample_times[0]
            ),
        ));
    }
    let detectors: Vec<Detector> = positions
        .iter()
        .map(|&c| Detector {
            center: c,
            width: window_width,
        })
        .collect();
    for d in &detectors {
        d.validate(scenario.grid())?;
    }
    let states = scenario.trajectory(sample_times)?;
    let nt = sample_times.len();
    let mut cells = Vec::with_capacity(positions.len() * nt);
    let mut sig = vec![vec![false; positions.len()]; nt];
    for (i, d) in detectors.iter().enumerate() {
        let p0 = d.probability(scenario.psi0())?;
        let base = sample_detection(p0, n, seed, stream_key(ids::SCAN, 0, i as u64))?;
        for (j, state) in states.iter().enumerate() {
            let p = d.probability(state)?;
            let index = (i * nt + j) as u64;
            let batch = sample_detection(p, n, seed, stream_key(ids::SCAN, 1, index))?;
            let test = two_proportion_test(&batch, &base, alpha)?;
            sig[j][i] = test.significant;
            cells.push(ScanCell {
                position: positions[i],
                time: sample_times[j],
                p_hat: batch.p_hat(),
                n,
                z_vs_baseline: test.z_statistic,
                significant: test.significant,
            });
        }
    }
    let summary = summarize(&sig, positions, sample_times, t1);
    Ok(ScanTable {
        positions: positions.to_vec(),
        times: sample_times.to_vec(),
        window_width,
        seed,
        alpha,
        cells,
        summary,
    })
}
