use crate::error::{Error, Result};

use super::dataset::{ColumnMeta, Matrix};
use super::tree::SmoothTree;

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub rho: f64,
    pub tree: SmoothTree,
}

/// Fitted boosting model: `F(x) = baseline + Σ_m v ρ_m h_m(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostEnsemble {
    baseline: f64,
    shrinkage: f64,
    stages: Vec<Stage>,
    columns: ColumnMeta,
    target_name: String,
}

impl BoostEnsemble {
    /// Checks the shrinkage range, column metadata, and that every split
    /// references a usable column with `slope = raw_gamma / sd`.
    pub fn new(
        baseline: f64,
        shrinkage: f64,
        stages: Vec<Stage>,
        columns: ColumnMeta,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        if !baseline.is_finite() {
            return Err(Error::invalid("baseline must be finite"));
        }
        if !(shrinkage > 0.0 && shrinkage <= 1.0) {
            return Err(Error::invalid(format!(
                "shrinkage ∈ (0,1], got {shrinkage}"
            )));
        }
        if columns.names.len() != columns.sd.len() || columns.is_empty() {
            return Err(Error::invalid(
                "column metadata needs one standard deviation per name and at least one column",
            ));
        }
        if columns.sd.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::invalid(
                "column standard deviations must be finite and nonnegative",
            ));
        }
        for (m, stage) in stages.iter().enumerate() {
            if !stage.rho.is_finite() {
                return Err(Error::invalid(format!("stage {m} has non-finite rho")));
            }
            for p in stage.tree.parents() {
                let sd = *columns.sd.get(p.variable).ok_or_else(|| {
                    Error::invalid(format!(
                        "stage {m} splits on column {} of {}",
                        p.variable,
                        columns.len()
                    ))
                })?;
                if sd <= 0.0 {
                    return Err(Error::invalid(format!(
                        "stage {m} splits on zero-variance column '{}'",
                        columns.names[p.variable]
                    )));
                }
                let expected = p.raw_gamma / sd;
                if (p.slope - expected).abs() > 1e-12 * expected.abs() {
                    return Err(Error::invalid(format!(
                        "stage {m} node {}: slope {} is not raw gamma / sd = {expected}",
                        p.position, p.slope
                    )));
                }
            }
        }
        Ok(Self {
            baseline,
            shrinkage,
            stages,
            columns,
            target_name: target_name.into(),
        })
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn columns(&self) -> &ColumnMeta {
        &self.columns
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub(crate) fn check_dim(&self, cols: usize) -> Result<()> {
        if cols != self.n_features() {
            return Err(Error::invalid(format!(
                "model expects {} covariates, got {cols}",
                self.n_features()
            )));
        }
        Ok(())
    }

    /// Same model with every leaf weight transformed by `f`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64 + Copy) -> BoostEnsemble {
        let mut out = self.clone();
        for s in &mut out.stages {
            s.tree = s.tree.map_weights(f);
        }
        out
    }

    pub(crate) fn predict_row(&self, point: &[f64], buf: &mut Vec<f64>) -> f64 {
        let mut acc = self.baseline;
        for s in &self.stages {
            acc += self.shrinkage * s.rho * s.tree.eval_with(point, buf);
        }
        acc
    }
}

/// Predictions for every row of `points`.
pub fn ensemble_predict(model: &BoostEnsemble, points: &Matrix) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    model.check_dim(points.cols())?;
    Ok((0..points.rows())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| model.predict_row(points.row(i), buf))
        .collect())
}
