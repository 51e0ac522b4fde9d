//! Numerical tolerances shared by the checks.

use serde::{Deserialize, Serialize};

/// Absolute floor for comparisons near zero.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// Relative tolerance, scaled by the sum of absolute values entering a computation.
pub const RELATIVE: f64 = 1e-9;

/// Cube sums smaller than this in magnitude are rejected by normalization.
pub const NULL_CUBE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    #[serde(default = "default_absolute")]
    pub absolute: f64,
    #[serde(default = "default_relative")]
    pub relative: f64,
}

fn default_absolute() -> f64 {
    ABSOLUTE_FLOOR
}

fn default_relative() -> f64 {
    RELATIVE
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            absolute: ABSOLUTE_FLOOR,
            relative: RELATIVE,
        }
    }
}

impl Tolerance {
    pub fn new(absolute: f64, relative: f64) -> Self {
        Self { absolute, relative }
    }

    /// Allowed deviation for a quantity built from terms whose absolute
    /// values sum to `scale`.
    pub fn allowance(&self, scale: f64) -> f64 {
        self.absolute + self.relative * scale.abs()
    }

    pub fn is_valid(&self) -> bool {
        self.absolute.is_finite()
            && self.relative.is_finite()
            && self.absolute >= 0.0
            && self.relative >= 0.0
    }
}
