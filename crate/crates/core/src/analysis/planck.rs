use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Planck length in meters, at the commonly quoted four-digit value.
pub const PLANCK_LENGTH: f64 = 1.616e-35;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Planck-scale delay and the resulting cap on a single register's operation rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanckLimits {
    /// meters
    pub l_p: f64,
    /// m/s
    pub c: f64,
    /// seconds
    pub t_p: f64,
    /// operations per second
    pub max_ips_per_register: f64,
}

impl PlanckLimits {
    /// JSON object with every quantity annotated by its SI unit.
    pub fn to_json(&self) -> Value {
        json!({
            "l_P": { "value": self.l_p, "unit": "m" },
            "c": { "value": self.c, "unit": "m/s" },
            "t_P": { "value": self.t_p, "unit": "s" },
            "max_ips_per_register": { "value": self.max_ips_per_register, "unit": "1/s" },
        })
    }
}

/// `t_P = l_P / c` and `1 / t_P`.
pub fn planck_limits(l_p: f64, c: f64) -> Result<PlanckLimits> {
    if !(l_p.is_finite() && l_p > 0.0) {
        return Err(Error::param("l_p", format!("{l_p} must be positive")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::param("c", format!("{c} must be positive")));
    }
    let t_p = l_p / c;
    Ok(PlanckLimits {
        l_p,
        c,
        t_p,
        max_ips_per_register: 1.0 / t_p,
    })
}
