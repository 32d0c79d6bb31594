use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::invalid(format!(
                "matrix shape {rows}x{cols} does not match {} values",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::invalid(format!(
                "row {i} has {} values, expected {cols}",
                r.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // chunks_exact would yield nothing for zero-width matrices
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Sample standard deviation (divisor `n - 1`). A constant column, or a
/// column with fewer than two values, has standard deviation exactly zero.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 || values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Names and training standard deviations of the covariate columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub names: Vec<String>,
    pub sd: Vec<f64>,
}

impl ColumnMeta {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Columns with positive spread. Only these may carry splits.
    pub fn eligible(&self) -> Vec<usize> {
        (0..self.sd.len()).filter(|&s| self.sd[s] > 0.0).collect()
    }
}

/// Covariates, response and column metadata for one regression problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    covariates: Matrix,
    response: Vec<f64>,
    columns: ColumnMeta,
    target_name: String,
}

impl Dataset {
    /// Validates shapes and finiteness and computes the column standard
    /// deviations.
    pub fn new(
        covariates: Matrix,
        response: Vec<f64>,
        column_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        let (n, m) = (covariates.rows(), covariates.cols());
        if n == 0 || m == 0 {
            return Err(Error::invalid(format!(
                "dataset needs at least one row and one column, got {n}x{m}"
            )));
        }
        if response.len() != n {
            return Err(Error::invalid(format!(
                "response has {} values for {n} rows",
                response.len()
            )));
        }
        if column_names.len() != m {
            return Err(Error::invalid(format!(
                "{} column names for {m} columns",
                column_names.len()
            )));
        }
        if let Some(pos) = covariates.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite covariate at row {}, column '{}'",
                pos / m,
                column_names[pos % m]
            )));
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite response at row {i}")));
        }
        let sd = (0..m).map(|j| sample_sd(&covariates.column(j))).collect();
        Ok(Self {
            covariates,
            response,
            columns: ColumnMeta {
                names: column_names,
                sd,
            },
            target_name: target_name.into(),
        })
    }

    /// Dataset with generated column names `x1..xm` and target `y`.
    pub fn from_xy(covariates: Matrix, response: Vec<f64>) -> Result<Self> {
        let names = (1..=covariates.cols()).map(|j| format!("x{j}")).collect();
        Self::new(covariates, response, names, "y")
    }

    pub fn covariates(&self) -> &Matrix {
        &self.covariates
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn columns(&self) -> &ColumnMeta {
        &self.columns
    }

    pub fn column_sd(&self) -> &[f64] {
        &self.columns.sd
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn n_rows(&self) -> usize {
        self.covariates.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.covariates.cols()
    }

    /// Sub-sample of rows. Standard deviations are recomputed on the subset.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Dataset> {
        let response = indices.iter().map(|&i| self.response[i]).collect();
        Dataset::new(
            self.covariates.select_rows(indices),
            response,
            self.columns.names.clone(),
            self.target_name.clone(),
        )
    }

    /// Same covariates with a different response vector.
    pub fn with_response(&self, response: Vec<f64>) -> Result<Dataset> {
        if response.len() != self.n_rows() {
            return Err(Error::invalid("replacement response has the wrong length"));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite response"));
        }
        Ok(Dataset {
            response,
            ..self.clone()
        })
    }

    /// Re-derives every column standard deviation and compares it with the
    /// stored value.
    pub fn validate(&self) -> Result<()> {
        for (j, &stored) in self.columns.sd.iter().enumerate() {
            let fresh = sample_sd(&self.covariates.column(j));
            if (fresh - stored).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "column '{}' standard deviation {stored} does not match {fresh}",
                    self.columns.names[j]
                )));
            }
        }
        Ok(())
    }
}
