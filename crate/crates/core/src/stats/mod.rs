//! Born-rule sampling and the proportion tests built on it.

mod rng;
mod sampling;
mod test;

pub use rng::{stream_key, trial_rng};
pub use sampling::{sample_detection, Provenance, TrialBatch};
pub use test::{two_proportion_test, TestResult};
