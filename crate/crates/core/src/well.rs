use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry and wall heights of the quenched square well.
///
/// The potential is zero on `[x_a, x_b]`. Before the quench both walls sit
/// at `v0`; at `t1` the left wall (point A) jumps to `v1` while the right
/// wall stays at `v0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellConfig {
    pub x_a: f64,
    pub x_b: f64,
    pub v0: f64,
    pub v1: f64,
    pub t1: f64,
}

/// Which side of the quench a Hamiltonian describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Pre,
    Post,
}

impl WellConfig {
    /// The reference scenario: unit width, `V0 = 200`, `V1 = 400`, quench at `t1 = 1`.
    pub fn reference() -> Self {
        WellConfig {
            x_a: 0.0,
            x_b: 1.0,
            v0: 200.0,
            v1: 400.0,
            t1: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_b - self.x_a
    }

    /// `V1 == V0`: the quench changes nothing.
    pub fn is_trivial(&self) -> bool {
        self.v1 == self.v0
    }

    /// `(left, right)` wall heights in the given phase.
    pub fn walls(&self, phase: Phase) -> (f64, f64) {
        match phase {
            Phase::Pre => (self.v0, self.v0),
            Phase::Post => (self.v1, self.v0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_a, self.x_b, self.v0, self.v1, self.t1]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("well", "all well parameters must be finite"));
        }
        if self.x_a >= self.x_b {
            return Err(Error::param(
                "well.x_a",
                format!("x_a = {} must lie left of x_b = {}", self.x_a, self.x_b),
            ));
        }
        if self.v0 <= 0.0 {
            return Err(Error::param(
                "well.v0",
                format!("V0 = {} must be positive", self.v0),
            ));
        }
        if self.v1 <= 0.0 {
            return Err(Error::param(
                "well.v1",
                format!("V1 = {} must be positive", self.v1),
            ));
        }
        if self.t1 < 0.0 {
            return Err(Error::param(
                "well.t1",
                format!("t1 = {} must be non-negative", self.t1),
            ));
        }
        Ok(())
    }
}
