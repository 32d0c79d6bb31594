use crate::error::{Error, Result};
use crate::model::{BoostEnsemble, Matrix};
use crate::partial::{ensemble_partial, PartialEffectRequest};

use super::stats::{quantile, rmse};

/// Mask of values inside the `[lo, hi]` empirical quantile window.
pub fn central_window(values: &[f64], window: (f64, f64)) -> Result<Vec<bool>> {
    let (lo, hi) = window;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::invalid(format!(
            "quantile window must satisfy 0 ≤ lo < hi ≤ 1, got ({lo}, {hi})"
        )));
    }
    let (qlo, qhi) = (quantile(values, lo)?, quantile(values, hi)?);
    Ok(values.iter().map(|&v| qlo <= v && v <= qhi).collect())
}

/// RMSE of derivative estimates against the truth, inside and outside the
/// quantile window of `column`.
pub fn derivative_recovery_from_estimates(
    estimates: &[f64],
    truth: &[f64],
    column: &[f64],
    window: (f64, f64),
) -> Result<(f64, f64)> {
    if estimates.len() != truth.len() || truth.len() != column.len() {
        return Err(Error::invalid("estimates, truth and column must share a length"));
    }
    let mask = central_window(column, window)?;
    let split = |inside: bool| -> (Vec<f64>, Vec<f64>) {
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m == inside)
            .map(|(i, _)| (estimates[i], truth[i]))
            .unzip()
    };
    let (ein, tin) = split(true);
    let (eout, tout) = split(false);
    if ein.is_empty() || eout.is_empty() {
        return Err(Error::invalid(format!(
            "quantile window ({}, {}) leaves an empty partition",
            window.0, window.1
        )));
    }
    Ok((rmse(&tin, &ein)?, rmse(&tout, &eout)?))
}

/// [`derivative_recovery_from_estimates`] with estimates from the model's
/// analytical partial effects at `points`.
pub fn derivative_recovery(
    model: &BoostEnsemble,
    truth_partial: &[f64],
    points: &Matrix,
    variable: usize,
    window: (f64, f64),
) -> Result<(f64, f64)> {
    let request = PartialEffectRequest::new(points.clone(), variable)?;
    let est = ensemble_partial(model, &request)?;
    derivative_recovery_from_estimates(&est, truth_partial, &points.column(variable), window)
}
