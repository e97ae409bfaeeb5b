use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hölder exponent, strictly between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn half() -> Self {
        Alpha(0.5)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `t^α` for `t ≥ 0`.
    #[inline]
    pub fn pow(self, t: f64) -> f64 {
        t.powf(self.0)
    }

    /// Conjugate exponent `1/(1−α)` used to combine local constants.
    #[inline]
    pub(crate) fn conjugate(self) -> f64 {
        1.0 / (1.0 - self.0)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
