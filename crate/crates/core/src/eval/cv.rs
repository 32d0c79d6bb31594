use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::rng;

use super::learners::Learner;
use super::stats::{paired_t_test, rmse};

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub k: usize,
    /// Model whose mean RMSE divides every entry of the relative table.
    pub reference: String,
    /// Model every other model is t-tested against.
    pub champion: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub k: usize,
    pub reference: String,
    pub champion: String,
    pub per_fold_rmse: BTreeMap<String, Vec<f64>>,
    pub mean_rmse: BTreeMap<String, f64>,
    pub relative_table: BTreeMap<String, f64>,
    pub p_values: BTreeMap<String, f64>,
    /// Per-model diagnostics, prefixed with the fold they came from.
    pub notes: BTreeMap<String, Vec<String>>,
}

impl CvResult {
    pub fn is_empty(&self) -> bool {
        self.per_fold_rmse.is_empty()
    }
}

/// Shuffles `0..n` with `seed` and cuts it into `k` contiguous folds whose
/// sizes differ by at most one.
pub fn fold_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "k-fold needs 2 ≤ k ≤ N, got k = {k}, N = {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, 0));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Every model's mean RMSE divided by that of `reference`.
pub fn relative_table(
    mean_rmse: &BTreeMap<String, f64>,
    reference: &str,
) -> Result<BTreeMap<String, f64>> {
    let base = *mean_rmse
        .get(reference)
        .ok_or_else(|| Error::invalid(format!("reference model '{reference}' has no score")))?;
    if !(base > 0.0) {
        return Err(Error::DegenerateData(format!(
            "reference model '{reference}' has RMSE {base}; relative table undefined"
        )));
    }
    Ok(mean_rmse
        .iter()
        .map(|(k, &v)| (k.clone(), if k == reference { 1.0 } else { v / base }))
        .collect())
}

/// Fits every model on each training split and scores it on the held-out
/// fold. Model-fold jobs run in parallel; fold `f` trains with the seed
/// derived from `(config.seed, f)`.
pub fn kfold_cv(data: &Dataset, models: &[Box<dyn Learner>], config: &CvConfig) -> Result<CvResult> {
    if models.is_empty() {
        return Err(Error::invalid("cross-validation needs at least one model"));
    }
    let names: BTreeSet<&str> = models.iter().map(|m| m.name()).collect();
    if names.len() != models.len() {
        return Err(Error::invalid("model names must be unique"));
    }
    for (role, name) in [("reference", &config.reference), ("champion", &config.champion)] {
        if !names.contains(name.as_str()) {
            return Err(Error::invalid(format!("{role} model '{name}' not in the model list")));
        }
    }
    let folds = fold_partition(data.n_rows(), config.k, config.seed)?;
    let n = data.n_rows();

    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..config.k).map(move |f| (m, f)))
        .collect();
    let scores: Vec<(f64, Vec<String>)> = jobs
        .par_iter()
        .map(|&(mi, f)| {
            let model = &models[mi];
            let wrap = |e: Error| Error::Fold {
                model: model.name().to_string(),
                fold: f,
                source: Box::new(e),
            };
            let mut held = vec![false; n];
            for &i in &folds[f] {
                held[i] = true;
            }
            let train_idx: Vec<usize> = (0..n).filter(|&i| !held[i]).collect();
            let train = data.select_rows(&train_idx).map_err(wrap)?;
            let test = data.select_rows(&folds[f]).map_err(wrap)?;
            let fitted = model
                .fit(&train, rng::derive_seed(config.seed, f as u64))
                .map_err(wrap)?;
            let pred = fitted.predict(test.covariates()).map_err(wrap)?;
            let score = rmse(test.response(), &pred).map_err(wrap)?;
            let notes = fitted
                .notes
                .iter()
                .map(|s| format!("fold {f}: {s}"))
                .collect();
            Ok((score, notes))
        })
        .collect::<Result<_>>()?;

    let mut per_fold_rmse = BTreeMap::new();
    let mut notes = BTreeMap::new();
    for (mi, model) in models.iter().enumerate() {
        let chunk = &scores[mi * config.k..(mi + 1) * config.k];
        per_fold_rmse.insert(
            model.name().to_string(),
            chunk.iter().map(|(s, _)| *s).collect::<Vec<_>>(),
        );
        let n: Vec<String> = chunk.iter().flat_map(|(_, n)| n.clone()).collect();
        if !n.is_empty() {
            notes.insert(model.name().to_string(), n);
        }
    }
    let mean_rmse: BTreeMap<String, f64> = per_fold_rmse
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    let relative_table = relative_table(&mean_rmse, &config.reference)?;
    let champion = &per_fold_rmse[&config.champion];
    let p_values = per_fold_rmse
        .iter()
        .map(|(k, v)| Ok((k.clone(), paired_t_test(v, champion)?)))
        .collect::<Result<_>>()?;

    Ok(CvResult {
        k: config.k,
        reference: config.reference.clone(),
        champion: config.champion.clone(),
        per_fold_rmse,
        mean_rmse,
        relative_table,
        p_values,
        notes,
    })
}
