use std::fmt;

use rayon::prelude::*;

use crate::boost::{fit, FitReport};
use crate::error::{Error, Result};
use crate::model::{Dataset, Hyperparameters};

/// One setting of the hyperparameter under study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Shrinkage(f64),
    Splits(usize),
    GammaRange(f64, f64),
}

impl SweepValue {
    pub fn apply(&self, base: &Hyperparameters) -> Result<Hyperparameters> {
        let p = base.clone();
        match *self {
            SweepValue::Shrinkage(v) => p.with_shrinkage(v),
            SweepValue::Splits(s) => p.with_splits_per_tree(s),
            SweepValue::GammaRange(lo, hi) => p.with_gamma_range(lo, hi),
        }
    }
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Shrinkage(v) => write!(f, "shrinkage={v}"),
            SweepValue::Splits(s) => write!(f, "splits={s}"),
            SweepValue::GammaRange(lo, hi) => write!(f, "gamma=[{lo},{hi}]"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepTrace {
    pub value: SweepValue,
    pub report: FitReport,
}

/// Fits one model per grid value on the same data and seed, varying only the
/// swept hyperparameter. Traces come back in grid order.
pub fn convergence_experiment(
    data: &Dataset,
    base: &Hyperparameters,
    grid: &[SweepValue],
) -> Result<Vec<SweepTrace>> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    grid.par_iter()
        .map(|&value| {
            let wrap = |e: Error| Error::Sweep {
                value: value.to_string(),
                source: Box::new(e),
            };
            let params = value.apply(base).map_err(wrap)?;
            let (_, report) = fit(data, &params).map_err(wrap)?;
            Ok(SweepTrace { value, report })
        })
        .collect()
}

/// First iteration (1-based) at which `trace` is within `rel_tol` of its own
/// minimum.
pub fn iterations_to_floor(trace: &[f64], rel_tol: f64) -> Option<usize> {
    let floor = trace.iter().copied().fold(f64::INFINITY, f64::min);
    trace
        .iter()
        .position(|&v| v <= floor * (1.0 + rel_tol))
        .map(|i| i + 1)
}
