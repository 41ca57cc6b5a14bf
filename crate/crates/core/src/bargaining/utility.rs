use crate::{Error, Result};

/// Utility of a player as a function of its broadcast time.
///
/// Every variant is differentiable, strictly increasing and concave on
/// `[0, cap]`, where `cap` is the time needed to broadcast all of the
/// player's data.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Utility {
    /// `x / cap`: the achieved share of the maximum dissemination rate.
    #[default]
    NormalizedLinear,
    /// `ln(1 + x / shift)` with `shift > 0`.
    LogShifted { shift: f64 },
    /// `(x / cap)^exponent` with `0 < exponent <= 1`.
    Power { exponent: f64 },
}

impl Utility {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Utility::NormalizedLinear => Ok(()),
            Utility::LogShifted { shift } if shift > 0.0 && shift.is_finite() => Ok(()),
            Utility::Power { exponent } if exponent > 0.0 && exponent <= 1.0 => Ok(()),
            other => Err(Error::InvalidProblem(format!(
                "utility parameters out of range: {other:?}"
            ))),
        }
    }

    pub fn value(&self, x: f64, cap: f64) -> f64 {
        match *self {
            Utility::NormalizedLinear => x / cap,
            Utility::LogShifted { shift } => (x / shift).ln_1p(),
            Utility::Power { exponent } => (x / cap).powf(exponent),
        }
    }

    pub fn derivative(&self, x: f64, cap: f64) -> f64 {
        match *self {
            Utility::NormalizedLinear => 1.0 / cap,
            Utility::LogShifted { shift } => 1.0 / (shift + x),
            Utility::Power { exponent } => exponent * (x / cap).powf(exponent - 1.0) / cap,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Utility::NormalizedLinear)
    }
}
