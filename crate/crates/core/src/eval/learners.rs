use crate::boost;
use crate::error::{Error, Result};
use crate::model::{ensemble_predict, BoostEnsemble, Dataset, Hyperparameters, Matrix};

type PredictFn = Box<dyn Fn(&Matrix) -> Result<Vec<f64>> + Send + Sync>;

/// A trained model as seen by the evaluation harness.
pub struct Fitted {
    predict: PredictFn,
    /// Diagnostics worth surfacing next to the scores.
    pub notes: Vec<String>,
}

impl Fitted {
    pub fn new(predict: impl Fn(&Matrix) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        Self {
            predict: Box::new(predict),
            notes: Vec::new(),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        (self.predict)(x)
    }
}

/// Anything the harness can train on a fold.
pub trait Learner: Send + Sync {
    fn name(&self) -> &str;

    /// `seed` is derived per fold by the caller; deterministic learners may
    /// ignore it.
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Fitted>;
}

/// Predicts the training mean everywhere.
#[derive(Debug, Clone)]
pub struct MeanLearner {
    name: String,
}

impl Default for MeanLearner {
    fn default() -> Self {
        Self {
            name: "mean".into(),
        }
    }
}

impl Learner for MeanLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, train: &Dataset, _seed: u64) -> Result<Fitted> {
        let y = train.response();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        Ok(Fitted::new(move |x: &Matrix| Ok(vec![mean; x.rows()])))
    }
}

/// Ordinary least squares with intercept, solved from the normal equations
/// with a `1e-10` ridge on the diagonal.
#[derive(Debug, Clone)]
pub struct OlsLearner {
    name: String,
}

impl Default for OlsLearner {
    fn default() -> Self {
        Self { name: "ols".into() }
    }
}

pub(crate) const OLS_RIDGE: f64 = 1e-10;

/// Intercept-first coefficients and a rank-deficiency flag.
pub(crate) fn ols_coefficients(x: &Matrix, y: &[f64]) -> Result<(Vec<f64>, bool)> {
    let p = x.cols() + 1;
    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut z = vec![1.0; p];
    for (row, &yi) in x.iter_rows().zip(y) {
        z[1..].copy_from_slice(row);
        for a in 0..p {
            xty[a] += z[a] * yi;
            for b in 0..=a {
                xtx[a * p + b] += z[a] * z[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtx[b * p + a] = xtx[a * p + b];
        }
    }
    let max_diag = (0..p).map(|a| xtx[a * p + a]).fold(0.0, f64::max);
    for a in 0..p {
        xtx[a * p + a] += OLS_RIDGE;
    }

    // Cholesky factorization in place (lower triangle)
    let mut deficient = false;
    for j in 0..p {
        let mut d = xtx[j * p + j];
        for k in 0..j {
            d -= xtx[j * p + k].powi(2);
        }
        if d <= 1e-12 * max_diag.max(1.0) {
            deficient = true;
        }
        if d <= 0.0 {
            return Err(Error::DegenerateData(
                "normal equations are not positive definite".into(),
            ));
        }
        let d = d.sqrt();
        xtx[j * p + j] = d;
        for i in j + 1..p {
            let mut s = xtx[i * p + j];
            for k in 0..j {
                s -= xtx[i * p + k] * xtx[j * p + k];
            }
            xtx[i * p + j] = s / d;
        }
    }
    let mut w = xty;
    for i in 0..p {
        for k in 0..i {
            w[i] -= xtx[i * p + k] * w[k];
        }
        w[i] /= xtx[i * p + i];
    }
    for i in (0..p).rev() {
        for k in i + 1..p {
            w[i] -= xtx[k * p + i] * w[k];
        }
        w[i] /= xtx[i * p + i];
    }
    Ok((w, deficient))
}

impl Learner for OlsLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, train: &Dataset, _seed: u64) -> Result<Fitted> {
        let (coef, deficient) = ols_coefficients(train.covariates(), train.response())?;
        let m = train.n_cols();
        let mut fitted = Fitted::new(move |x: &Matrix| {
            if x.cols() != m {
                return Err(Error::invalid(format!(
                    "OLS model expects {m} covariates, got {}",
                    x.cols()
                )));
            }
            Ok(x.iter_rows()
                .map(|r| coef[0] + r.iter().zip(&coef[1..]).map(|(a, b)| a * b).sum::<f64>())
                .collect())
        });
        if deficient {
            fitted
                .notes
                .push("rank-deficient design; ridge solution used".into());
        }
        Ok(fitted)
    }
}

/// The boosted smooth-tree model. The fold seed replaces the configured seed.
#[derive(Debug, Clone)]
pub struct BoostLearner {
    name: String,
    params: Hyperparameters,
}

impl BoostLearner {
    pub fn new(name: impl Into<String>, params: Hyperparameters) -> Self {
        Self {
            name: name.into(),
            params,
        }
    }
}

impl Learner for BoostLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Fitted> {
        let params = self.params.clone().with_seed(seed);
        let (model, _) = boost::fit(train, &params)?;
        Ok(Fitted::new(move |x: &Matrix| {
            ensemble_predict(&model as &BoostEnsemble, x)
        }))
    }
}

/// Elementwise transform applied to a column before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnTransform {
    Identity,
    /// Natural log; every value must be positive.
    Log,
}

impl ColumnTransform {
    fn apply(self, v: f64, what: &str) -> Result<f64> {
        match self {
            ColumnTransform::Identity => Ok(v),
            ColumnTransform::Log if v > 0.0 => Ok(v.ln()),
            ColumnTransform::Log => Err(Error::invalid(format!(
                "log transform of non-positive value {v} in {what}"
            ))),
        }
    }
}

/// Wraps a learner with user-declared covariate and response transforms,
/// e.g. a log-linear model as OLS on logged columns. Predictions of a logged
/// response are mapped back with `exp`.
pub struct TransformedLearner {
    name: String,
    inner: Box<dyn Learner>,
    columns: Vec<(usize, ColumnTransform)>,
    response: ColumnTransform,
}

impl TransformedLearner {
    pub fn new(
        name: impl Into<String>,
        inner: Box<dyn Learner>,
        columns: Vec<(usize, ColumnTransform)>,
        response: ColumnTransform,
    ) -> Self {
        Self {
            name: name.into(),
            inner,
            columns,
            response,
        }
    }
}

fn transform_matrix(x: &Matrix, columns: &[(usize, ColumnTransform)]) -> Result<Matrix> {
    let mut data = x.as_slice().to_vec();
    let m = x.cols();
    for &(j, t) in columns {
        if j >= m {
            return Err(Error::invalid(format!("transform for missing column {j}")));
        }
        for i in 0..x.rows() {
            data[i * m + j] = t.apply(data[i * m + j], "covariates")?;
        }
    }
    Matrix::new(x.rows(), m, data)
}

impl Learner for TransformedLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Fitted> {
        let x = transform_matrix(train.covariates(), &self.columns)?;
        let y = train
            .response()
            .iter()
            .map(|&v| self.response.apply(v, "response"))
            .collect::<Result<Vec<_>>>()?;
        let inner_data = Dataset::new(
            x,
            y,
            train.columns().names.clone(),
            train.target_name(),
        )?;
        let inner = self.inner.fit(&inner_data, seed)?;
        let columns = self.columns.clone();
        let logged = self.response == ColumnTransform::Log;
        let notes = inner.notes.clone();
        let mut fitted = Fitted::new(move |x: &Matrix| {
            let p = inner.predict(&transform_matrix(x, &columns)?)?;
            Ok(if logged {
                p.into_iter().map(f64::exp).collect()
            } else {
                p
            })
        });
        fitted.notes = notes;
        Ok(fitted)
    }
}

/// The unconditional mean and OLS benchmarks.
pub fn benchmark_models() -> Vec<Box<dyn Learner>> {
    vec![Box::new(MeanLearner::default()), Box::new(OlsLearner::default())]
}
