//! Diagnostics that score a response model against causality, normalization
//! and the wave equation, plus the delay and Planck-scale formulas.

mod audit;
mod front;
mod planck;
mod report;
mod residual;
mod trilemma;

pub use audit::{normalization_audit, NormAudit};
pub use front::{compute_tau, locate_front_points, window_probabilities, FrontPoints, Window};
pub use planck::{planck_limits, PlanckLimits, PLANCK_LENGTH, SPEED_OF_LIGHT};
pub use report::{paradox_report, ParadoxReport};
pub use residual::{eigenstate_baseline, equation_residual, Residual};
pub use trilemma::{
    settled_probe_time, trilemma, trilemma_row, TrilemmaRow, TrilemmaSettings, TrilemmaTable,
};
