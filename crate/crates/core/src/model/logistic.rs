use crate::error::{Error, Result};

/// Exponent arguments are clamped to `±EXPONENT_CLAMP` so `exp` never
/// overflows; beyond it the transition is saturated.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Transition values below this are flushed to exactly 0.
pub const SATURATION_FLOOR: f64 = 1e-300;

#[inline]
pub(crate) fn logistic_unchecked(x: f64, slope: f64, location: f64) -> f64 {
    let z = (slope * (x - location)).clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP);
    let l = 1.0 / (1.0 + (-z).exp());
    if l < SATURATION_FLOOR {
        0.0
    } else {
        l
    }
}

#[inline]
pub(crate) fn logistic_derivative_unchecked(x: f64, slope: f64, location: f64) -> f64 {
    let l = logistic_unchecked(x, slope, location);
    slope * l * (1.0 - l)
}

fn check(x: f64, slope: f64, location: f64) -> Result<()> {
    if !x.is_finite() || !location.is_finite() {
        return Err(Error::invalid(format!(
            "logistic arguments must be finite (x = {x}, location = {location})"
        )));
    }
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::invalid(format!(
            "logistic slope must be positive and finite, got {slope}"
        )));
    }
    Ok(())
}

/// Logistic transition `1 / (1 + exp(-slope * (x - location)))`.
///
/// Large slopes approach the step function `1{x > location}`; small slopes
/// make the transition close to linear around `location`.
pub fn logistic(x: f64, slope: f64, location: f64) -> Result<f64> {
    check(x, slope, location)?;
    Ok(logistic_unchecked(x, slope, location))
}

/// Derivative of [`logistic`] with respect to `x`: `slope * L * (1 - L)`.
/// Peaks at `slope / 4` when `x == location`.
pub fn logistic_derivative(x: f64, slope: f64, location: f64) -> Result<f64> {
    check(x, slope, location)?;
    Ok(logistic_derivative_unchecked(x, slope, location))
}
