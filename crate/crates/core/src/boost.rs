//! Gradient boosting under quadratic loss with smooth trees as weak learners.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::eval::rmse;
use crate::grow::{GrowthConfig, Grower, ThresholdRule};
use crate::model::{BoostEnsemble, Dataset, Hyperparameters, Stage};
use crate::rng;

/// Training diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// In-sample RMSE after each iteration.
    pub rmse_trace: Vec<f64>,
    /// Line-search step of each iteration.
    pub rho_trace: Vec<f64>,
    /// Fitted values after the last iteration.
    pub fitted: Vec<f64>,
    /// Seconds spent in [`fit`].
    pub wall_time: f64,
}

/// Closed-form minimizer of `Σ (u_i - ρ û_i)²`, or 0 for a null learner.
pub fn line_search(residuals: &[f64], fitted: &[f64]) -> f64 {
    assert_eq!(residuals.len(), fitted.len(), "line_search length mismatch");
    let uf: f64 = residuals.iter().zip(fitted).map(|(u, f)| u * f).sum();
    let ff: f64 = fitted.iter().map(|f| f * f).sum();
    if ff < 1e-300 {
        0.0
    } else {
        uf / ff
    }
}

pub(crate) fn growth_config(params: &Hyperparameters) -> GrowthConfig {
    GrowthConfig {
        splits: params.splits_per_tree(),
        gamma_range: params.gamma_range(),
        variable_fraction: params.variable_fraction(),
        thresholds: ThresholdRule::Quantiles(params.threshold_grid()),
    }
}

/// Fits `params.num_trees()` stages. Iteration `m` grows its tree with
/// random stream `m` of `params.seed()`.
pub fn fit(data: &Dataset, params: &Hyperparameters) -> Result<(BoostEnsemble, FitReport)> {
    let start = Instant::now();
    let y = data.response();
    let n = y.len();
    let baseline = y.iter().sum::<f64>() / n as f64;
    let v = params.shrinkage();
    let grower = Grower::new(data, growth_config(params))?;

    let mut phi = vec![baseline; n];
    let mut residuals = vec![0.0; n];
    let mut stages = Vec::with_capacity(params.num_trees());
    let mut rmse_trace = Vec::with_capacity(params.num_trees());
    let mut rho_trace = Vec::with_capacity(params.num_trees());

    for m in 0..params.num_trees() {
        for i in 0..n {
            residuals[i] = y[i] - phi[i];
        }
        let mut stream = rng::stream(params.seed(), m as u64);
        let grown = grower
            .grow(&residuals, &mut stream)
            .map_err(|e| Error::Iteration {
                iteration: m + 1,
                source: Box::new(e),
            })?;
        let rho = line_search(&residuals, &grown.fitted);
        for i in 0..n {
            phi[i] += v * rho * grown.fitted[i];
        }
        rmse_trace.push(rmse(y, &phi)?);
        rho_trace.push(rho);
        stages.push(Stage {
            rho,
            tree: grown.tree,
        });
    }

    let model = BoostEnsemble::new(
        baseline,
        v,
        stages,
        data.columns().clone(),
        data.target_name(),
    )?;
    let report = FitReport {
        rmse_trace,
        rho_trace,
        fitted: phi,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}
