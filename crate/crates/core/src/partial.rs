//! Analytical partial effects of fitted trees and ensembles.
//!
//! Each leaf basis is a product of logistic factors, so its derivative with
//! respect to one covariate is a sum over the parents splitting on that
//! covariate, each term being the product of the other factors times
//! `±slope·L·(1-L)`. Parents splitting on other covariates contribute nothing.
//!
//! Estimates are least reliable where the training data is sparse, typically
//! in the tails of a covariate's distribution; evaluating far outside the
//! training range is allowed but rarely meaningful.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BoostEnsemble, Matrix, SmoothTree};

/// Points at which to differentiate with respect to column `variable`.
#[derive(Debug, Clone)]
pub struct PartialEffectRequest {
    points: Matrix,
    variable: usize,
}

impl PartialEffectRequest {
    pub fn new(points: Matrix, variable: usize) -> Result<Self> {
        if variable >= points.cols() {
            return Err(Error::invalid(format!(
                "variable {variable} out of range for {} columns",
                points.cols()
            )));
        }
        Ok(Self { points, variable })
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn variable(&self) -> usize {
        self.variable
    }
}

/// `∂ tree(x) / ∂ x_variable` at `point`.
pub fn tree_partial(tree: &SmoothTree, point: &[f64], variable: usize) -> Result<f64> {
    tree.check_point(point)?;
    if variable >= point.len() {
        return Err(Error::invalid(format!(
            "variable {variable} out of range for a {}-dimensional point",
            point.len()
        )));
    }
    let mut buf = Vec::new();
    Ok(tree.partial_with(point, variable, &mut buf))
}

fn partial_row(model: &BoostEnsemble, point: &[f64], variable: usize, buf: &mut Vec<(f64, f64)>) -> f64 {
    let v = model.shrinkage();
    model
        .stages()
        .iter()
        .map(|s| v * s.rho * s.tree.partial_with(point, variable, buf))
        .sum()
}

/// Partial effect of the ensemble at every requested point. The baseline is
/// constant and contributes nothing.
pub fn ensemble_partial(model: &BoostEnsemble, request: &PartialEffectRequest) -> Result<Vec<f64>> {
    let points = request.points();
    model.check_dim(points.cols())?;
    let s = request.variable();
    Ok((0..points.rows())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| partial_row(model, points.row(i), s, buf))
        .collect())
}

/// Largest relative gap between the analytical partial effect and a central
/// difference with half-width `step`, over all points:
/// `|a - c| / (|a| + |c| + 1e-12)`.
pub fn finite_difference_check(
    model: &BoostEnsemble,
    points: &Matrix,
    variable: usize,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let request = PartialEffectRequest::new(points.clone(), variable)?;
    let analytic = ensemble_partial(model, &request)?;
    let errs: Vec<f64> = (0..points.rows())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let mut x = points.row(i).to_vec();
            let x0 = x[variable];
            x[variable] = x0 + step;
            let up = model.predict_row(&x, buf);
            x[variable] = x0 - step;
            let down = model.predict_row(&x, buf);
            let central = (up - down) / (2.0 * step);
            let a = analytic[i];
            (a - central).abs() / (a.abs() + central.abs() + 1e-12)
        })
        .collect();
    Ok(errs.into_iter().fold(0.0, f64::max))
}
