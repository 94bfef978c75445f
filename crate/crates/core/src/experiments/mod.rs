//! The signaling protocol, the three-phase probability protocol, the detector
//! scan and the response-speed bound.

mod detector;
mod protocol;
mod scan;
mod signaling;
mod vbound;

pub use detector::Detector;
pub use protocol::{
    run_probability_protocol, verdict_from_tests, Estimate, ExperimentReport, PairTests,
    ProtocolConfig, ProtocolSetup, Verdict,
};
pub use scan::{run_detector_scan, ChangeKind, ScanCell, ScanSummary, ScanTable};
pub use signaling::{
    mutual_information_bits, run_signaling, SignalingConfig, SignalingOutcome, SignalingSetup,
};
pub use vbound::{estimate_v_bound, VBoundReport, VBoundStep};

/// Experiment identifiers that key the random streams.
pub(crate) mod ids {
    pub const SIGNALING: u64 = 1;
    pub const PROTOCOL: u64 = 2;
    pub const SCAN: u64 = 3;
    pub const VBOUND: u64 = 4;
}
