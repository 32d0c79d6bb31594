use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::boost::FitReport;
use crate::error::{Error, Result};
use crate::eval::{CvResult, SweepTrace};
use crate::model::Matrix;

use super::{fmt_f64, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    /// Pretty-printed JSON.
    Structured,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Structured),
            other => Err(Error::invalid(format!(
                "unknown export format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Covariates, fitted values and partial effects at a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialEffectTable {
    pub column_names: Vec<String>,
    pub variable: String,
    pub points: Matrix,
    pub fitted: Vec<f64>,
    pub partial: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum Exportable<'a> {
    Fit(&'a FitReport),
    Cv(&'a CvResult),
    Partial(&'a PartialEffectTable),
    Sweep(&'a [SweepTrace]),
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("cannot export non-finite {what} ({v})")))
    }
}

fn num(v: f64, what: &str) -> Result<Value> {
    Ok(json!(finite(v, what)?))
}

fn nums(v: &[f64], what: &str) -> Result<Value> {
    v.iter().map(|&x| num(x, what)).collect::<Result<Vec<_>>>().map(Value::Array)
}

fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

fn fit_rows(report: &FitReport) -> Result<Vec<String>> {
    let mut out = vec!["iteration,rmse,rho".to_string()];
    for (m, (r, rho)) in report.rmse_trace.iter().zip(&report.rho_trace).enumerate() {
        out.push(format!(
            "{},{},{}",
            m + 1,
            fmt_f64(finite(*r, "rmse")?),
            fmt_f64(finite(*rho, "rho")?)
        ));
    }
    Ok(out)
}

fn fit_json(report: &FitReport) -> Result<Value> {
    Ok(json!({
        "iterations": report.rmse_trace.len(),
        "rmse": nums(&report.rmse_trace, "rmse")?,
        "rho": nums(&report.rho_trace, "rho")?,
    }))
}

fn cv_rows(cv: &CvResult) -> Result<Vec<String>> {
    let mut header = vec![
        "model".to_string(),
        "mean_rmse".into(),
        "relative".into(),
        "p_value".into(),
    ];
    header.extend((1..=cv.k).map(|f| format!("fold_{f}")));
    let mut out = vec![csv_line(&header)];
    for (name, folds) in &cv.per_fold_rmse {
        let mut row = vec![
            name.clone(),
            fmt_f64(finite(cv.mean_rmse[name], "mean rmse")?),
            fmt_f64(finite(cv.relative_table[name], "relative rmse")?),
            fmt_f64(finite(cv.p_values[name], "p-value")?),
        ];
        for &f in folds {
            row.push(fmt_f64(finite(f, "fold rmse")?));
        }
        out.push(csv_line(&row));
    }
    Ok(out)
}

fn cv_json(cv: &CvResult) -> Result<Value> {
    let mut models = Map::new();
    for (name, folds) in &cv.per_fold_rmse {
        let mut entry = json!({
            "mean_rmse": num(cv.mean_rmse[name], "mean rmse")?,
            "relative": num(cv.relative_table[name], "relative rmse")?,
            "p_value": num(cv.p_values[name], "p-value")?,
            "fold_rmse": nums(folds, "fold rmse")?,
        });
        if let Some(notes) = cv.notes.get(name) {
            entry["notes"] = json!(notes);
        }
        models.insert(name.clone(), entry);
    }
    Ok(json!({
        "k": cv.k,
        "reference": cv.reference,
        "champion": cv.champion,
        "models": models,
    }))
}

fn check_partial(t: &PartialEffectTable) -> Result<()> {
    let n = t.points.rows();
    if t.fitted.len() != n || t.partial.len() != n || t.column_names.len() != t.points.cols() {
        return Err(Error::invalid("partial-effect table has inconsistent lengths"));
    }
    Ok(())
}

fn partial_rows(t: &PartialEffectTable) -> Result<Vec<String>> {
    check_partial(t)?;
    let mut header = vec!["index".to_string()];
    header.extend(t.column_names.iter().cloned());
    header.push("fitted".into());
    header.push(format!("partial_{}", t.variable));
    let mut out = vec![csv_line(&header)];
    for (i, row) in t.points.iter_rows().enumerate() {
        let mut cells = vec![i.to_string()];
        for &v in row {
            cells.push(fmt_f64(finite(v, "covariate")?));
        }
        cells.push(fmt_f64(finite(t.fitted[i], "fitted value")?));
        cells.push(fmt_f64(finite(t.partial[i], "partial effect")?));
        out.push(csv_line(&cells));
    }
    Ok(out)
}

fn partial_json(t: &PartialEffectTable) -> Result<Value> {
    check_partial(t)?;
    let points = t
        .points
        .iter_rows()
        .map(|r| nums(r, "covariate"))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "columns": t.column_names,
        "variable": t.variable,
        "points": points,
        "fitted": nums(&t.fitted, "fitted value")?,
        "partial": nums(&t.partial, "partial effect")?,
    }))
}

fn sweep_rows(traces: &[SweepTrace]) -> Result<Vec<String>> {
    let mut out = vec!["value,iteration,rmse,rho".to_string()];
    for t in traces {
        for rest in fit_rows(&t.report)?.iter().skip(1) {
            out.push(format!("{},{rest}", t.value));
        }
    }
    Ok(out)
}

fn sweep_json(traces: &[SweepTrace]) -> Result<Value> {
    traces
        .iter()
        .map(|t| {
            let mut v = fit_json(&t.report)?;
            v["value"] = json!(t.value.to_string());
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

fn render(item: Exportable<'_>, format: ExportFormat) -> Result<String> {
    if let Exportable::Cv(cv) = item {
        if cv.is_empty() {
            return Err(Error::invalid("cross-validation result is empty"));
        }
    }
    if let Exportable::Sweep(t) = item {
        if t.is_empty() {
            return Err(Error::invalid("sweep produced no traces"));
        }
    }
    match format {
        ExportFormat::Csv => {
            let rows = match item {
                Exportable::Fit(r) => fit_rows(r)?,
                Exportable::Cv(c) => cv_rows(c)?,
                Exportable::Partial(t) => partial_rows(t)?,
                Exportable::Sweep(s) => sweep_rows(s)?,
            };
            let mut s = rows.join("\n");
            s.push('\n');
            Ok(s)
        }
        ExportFormat::Structured => {
            let v = match item {
                Exportable::Fit(r) => fit_json(r)?,
                Exportable::Cv(c) => cv_json(c)?,
                Exportable::Partial(t) => partial_json(t)?,
                Exportable::Sweep(s) => sweep_json(s)?,
            };
            let mut s = serde_json::to_string_pretty(&v)
                .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes `item` to `path`. Nothing is written if any value fails to render.
pub fn export_results(item: Exportable<'_>, format: ExportFormat, path: impl AsRef<Path>) -> Result<()> {
    let body = render(item, format)?;
    write_atomic(path.as_ref(), |w| w.write_all(body.as_bytes()))
}

/// One prediction per line under a `prediction` header.
pub fn write_predictions(predictions: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut body = String::from("prediction\n");
    for &p in predictions {
        body.push_str(&fmt_f64(finite(p, "prediction")?));
        body.push('\n');
    }
    write_atomic(path.as_ref(), |w| w.write_all(body.as_bytes()))
}
