//! A one-dimensional square-well quench laboratory.
//!
//! The left wall of a finite square well jumps from `V0` to `V1` at `t1`.
//! This crate solves both wells, evolves states with a norm-preserving
//! Crank–Nicolson propagator, implements four rival rules for what the
//! wavefunction does after the quench, scores each against causality,
//! normalization and the wave equation, and runs Monte-Carlo detection
//! experiments on top of them.
//!
//! ```
//! use chronon_core::{Grid, QuenchScenario, ResponseModel, WellConfig};
//!
//! let well = WellConfig::reference();
//! let grid = Grid::around_well(&well, 512, 2.0).unwrap();
//! let s = QuenchScenario::new(&grid, well, 1, ResponseModel::Instantaneous, 1.0).unwrap();
//! let psi = s.state_at(well.t1 + 0.01).unwrap();
//! assert!((psi.norm_sqr() - 1.0).abs() < 1e-9);
//! ```
//!
//! Units are `ħ = m = 1`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod hamiltonian;
pub mod models;
pub mod output;
pub mod propagate;
pub mod stats;
pub mod tridiag;
pub mod wavefunction;
pub mod well;

pub use analysis::{
    compute_tau, locate_front_points, normalization_audit, paradox_report, planck_limits, trilemma,
    FrontPoints, NormAudit, ParadoxReport, PlanckLimits, Residual, TrilemmaRow, TrilemmaSettings,
    TrilemmaTable,
};
pub use config::RunConfig;
pub use eigen::solve_stationary;
pub use error::{Error, Result};
pub use experiments::{
    estimate_v_bound, run_detector_scan, run_probability_protocol, run_signaling, Detector,
    ExperimentReport, ProtocolConfig, ScanTable, SignalingConfig, SignalingOutcome, VBoundReport,
    Verdict,
};
pub use grid::Grid;
pub use hamiltonian::{build_hamiltonian, Hamiltonian};
pub use models::{FrontDirection, QuenchScenario, ResponseModel};
pub use output::{OutputFormat, PlotKind, PlotManifest};
pub use propagate::{evolve_step, Propagator};
pub use stats::{sample_detection, two_proportion_test, TestResult, TrialBatch};
pub use wavefunction::Wavefunction;
pub use well::{Phase, WellConfig};
