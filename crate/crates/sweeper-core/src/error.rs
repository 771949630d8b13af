//! Error type shared across the crate.

use core::fmt;

/// Everything that can go wrong while evaluating fields or running ensembles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument was out of range (non-finite, non-positive
    /// where positivity is required, attenuation outside `[0, 1]`, ...).
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Value that was rejected.
        value: f64,
        /// What would have been accepted.
        expected: &'static str,
    },
    /// Total density fell below the configured floor, so the guidance
    /// velocity `J/P` is numerically meaningless at this point. Callers that
    /// keep integrating should clamp to the dominant channel's convective
    /// velocity instead.
    DensityUnderflow { x: f64, t: f64, density: f64, floor: f64 },
    /// A bracketed root search found no sign change over the given interval.
    NoUniqueRoot { lo: f64, hi: f64 },
    /// A profile window held fewer than two full max/min fringe pairs, so no
    /// contrast can be measured.
    NoFringesDetected { window_lo: f64, window_hi: f64, extrema: usize },
    /// A trajectory left the guarded integration domain.
    DomainEscape { t: f64, x: f64, bound: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, expected } => {
                write!(f, "invalid parameter {name} = {value}: expected {expected}")
            }
            Error::DensityUnderflow { x, t, density, floor } => {
                write!(
                    f,
                    "total density {density:e} below floor {floor:e} at x = {x}, t = {t}"
                )
            }
            Error::NoUniqueRoot { lo, hi } => {
                write!(f, "no sign change over [{lo}, {hi}]: root not bracketed")
            }
            Error::NoFringesDetected { window_lo, window_hi, extrema } => {
                write!(
                    f,
                    "found {extrema} interior extrema in [{window_lo}, {window_hi}]: \
                     need at least two full max/min pairs"
                )
            }
            Error::DomainEscape { t, x, bound } => {
                write!(f, "trajectory left |x| <= {bound} at x = {x}, t = {t}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Rejects non-finite values and values outside simple open/closed bounds.
pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64, Error> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value, expected: "a finite number" })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64, Error> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value, expected: "a finite number > 0" })
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64, Error> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value, expected: "a value in [0, 1]" })
    }
}
