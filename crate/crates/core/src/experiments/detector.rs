use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::wavefunction::{prob_in_region, Wavefunction};

/// A counting window `[center − width/2, center + width/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub center: f64,
    pub width: f64,
}

impl Detector {
    /// Window centered a distance `l` to the right of `x_a`.
    pub fn at_distance(x_a: f64, l: f64, width: f64) -> Self {
        Detector {
            center: x_a + l,
            width,
        }
    }

    pub fn region(&self) -> (f64, f64) {
        (
            self.center - 0.5 * self.width,
            self.center + 0.5 * self.width,
        )
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::param(
                "detector.width",
                format!("{} must be positive", self.width),
            ));
        }
        let (lo, hi) = self.region();
        if !grid.contains(lo) || !grid.contains(hi) {
            return Err(Error::param(
                "detector",
                format!(
                    "region [{lo}, {hi}) lies outside the grid domain [{}, {}]",
                    grid.x_min(),
                    grid.x_max()
                ),
            ));
        }
        Ok(())
    }

    pub fn probability(&self, psi: &Wavefunction) -> Result<f64> {
        let (lo, hi) = self.region();
        Ok(prob_in_region(psi, lo, hi)?.clamp(0.0, 1.0))
    }
}
