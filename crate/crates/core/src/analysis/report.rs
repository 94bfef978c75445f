use serde::{Deserialize, Serialize};

use super::audit::{normalization_audit, NormAudit};
use super::front::FrontPoints;
use super::residual::{eigenstate_baseline, equation_residual, Residual};
use super::trilemma::{settled_probe_time, TrilemmaSettings};
use crate::error::Result;
use crate::models::{QuenchScenario, ResponseModel};
use crate::well::WellConfig;

/// Normalization, residual and front-point diagnostics for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub well: WellConfig,
    pub model: ResponseModel,
    pub front_points: FrontPoints,
    pub audit: NormAudit,
    pub probe_time: f64,
    pub residual: Residual,
    pub baseline: f64,
}

/// Audits `scenario` at `t1 + offsets` and probes its residual where the trilemma would.
pub fn paradox_report(
    scenario: &QuenchScenario,
    settings: &TrilemmaSettings,
    front_points: FrontPoints,
) -> Result<ParadoxReport> {
    let t1 = scenario.well().t1;
    let mut offsets = settings.offsets.clone();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();
    let times: Vec<f64> = offsets.iter().map(|o| t1 + o).collect();
    let audit = normalization_audit(scenario, &times)?;
    let (probe_time, dt_probe) = settled_probe_time(scenario, settings);
    let h = scenario.h_post();
    let residual = equation_residual(|t| scenario.state_at(t), h, probe_time, dt_probe)?;
    let baseline = eigenstate_baseline(h.expectation(scenario.psi1()), dt_probe);
    Ok(ParadoxReport {
        well: *scenario.well(),
        model: *scenario.model(),
        front_points,
        audit,
        probe_time,
        residual,
        baseline,
    })
}
