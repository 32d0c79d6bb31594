use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{ColumnMeta, Dataset, Matrix};

use super::{fmt_f64, write_atomic};

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub target: String,
    /// Covariate columns in the order they should appear; `None` selects
    /// every column other than the target.
    pub features: Option<Vec<String>>,
    /// Map a text column with at most two distinct values to 0/1, assigning
    /// 0 to the lexicographically smaller value.
    pub binary_text: bool,
}

#[derive(Debug, Clone)]
pub struct CsvLoad {
    pub dataset: Dataset,
    /// Rows skipped because a selected cell was empty or `NA`.
    pub dropped_rows: usize,
    /// `(column, value mapped to 0, value mapped to 1)` for binary text columns.
    pub binary_columns: Vec<(String, String, String)>,
}

fn csv_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

struct Table {
    header: Vec<String>,
    /// (line number, cells)
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(::csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(csv_err(path, "missing header row"));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_err(path, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { header, rows })
}

fn column_index(path: &Path, header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| csv_err(path, format!("column '{name}' not found")))
}

/// Reads a dataset with `target` as response and every other column (or the
/// listed `features`) as covariates.
pub fn read_csv(path: impl AsRef<Path>, target: &str, features: Option<&[String]>) -> Result<CsvLoad> {
    read_csv_with(
        path,
        &CsvOptions {
            target: target.to_string(),
            features: features.map(<[String]>::to_vec),
            binary_text: false,
        },
    )
}

pub fn read_csv_with(path: impl AsRef<Path>, options: &CsvOptions) -> Result<CsvLoad> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let target = column_index(path, &table.header, &options.target)?;
    let features: Vec<usize> = match &options.features {
        Some(names) => names
            .iter()
            .map(|n| column_index(path, &table.header, n))
            .collect::<Result<_>>()?,
        None => (0..table.header.len()).filter(|&j| j != target).collect(),
    };
    if features.is_empty() {
        return Err(csv_err(path, "no covariate columns selected"));
    }
    if features.contains(&target) {
        return Err(csv_err(path, "the target cannot also be a covariate"));
    }
    let selected: Vec<usize> = features.iter().copied().chain([target]).collect();

    // binary text columns are recognized before numeric parsing
    let mut binary: Vec<Option<(String, String)>> = vec![None; table.header.len()];
    let mut binary_columns = Vec::new();
    if options.binary_text {
        for &j in &selected {
            let values: BTreeSet<&str> = table
                .rows
                .iter()
                .filter_map(|(_, r)| r.get(j).map(String::as_str))
                .filter(|c| !is_missing(c))
                .collect();
            let textual = values.iter().any(|v| v.parse::<f64>().is_err());
            if textual && values.len() <= 2 {
                let mut it = values.iter();
                let zero = it.next().map_or(String::new(), |s| s.to_string());
                let one = it.next().map_or(String::new(), |s| s.to_string());
                binary_columns.push((table.header[j].clone(), zero.clone(), one.clone()));
                binary[j] = Some((zero, one));
            }
        }
    }

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut dropped = 0;
    'rows: for (line, cells) in &table.rows {
        let mut parsed = Vec::with_capacity(selected.len());
        for &j in &selected {
            let cell = cells.get(j).map_or("", String::as_str);
            if is_missing(cell) {
                dropped += 1;
                continue 'rows;
            }
            let value = match &binary[j] {
                Some((zero, _)) => f64::from(u8::from(cell != zero)),
                None => cell.parse::<f64>().map_err(|_| {
                    csv_err(
                        path,
                        format!(
                            "column '{}': non-numeric value '{cell}' at line {line}",
                            table.header[j]
                        ),
                    )
                })?,
            };
            if !value.is_finite() {
                return Err(csv_err(
                    path,
                    format!(
                        "column '{}': non-finite value '{cell}' at line {line}",
                        table.header[j]
                    ),
                ));
            }
            parsed.push(value);
        }
        y.push(parsed.pop().expect("target is selected"));
        x.extend(parsed);
    }
    if y.is_empty() {
        return Err(csv_err(path, "no usable rows"));
    }
    let names = features.iter().map(|&j| table.header[j].clone()).collect();
    let covariates = Matrix::new(y.len(), features.len(), x)?;
    let dataset = Dataset::new(covariates, y, names, options.target.clone())?;
    Ok(CsvLoad {
        dataset,
        dropped_rows: dropped,
        binary_columns,
    })
}

/// Reads the covariate columns a model was trained on, in the model's order.
/// Besides those, only the model's target column may be present.
pub fn read_features(path: impl AsRef<Path>, columns: &ColumnMeta, target: &str) -> Result<Matrix> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let extra: Vec<&String> = table
        .header
        .iter()
        .filter(|h| columns.index_of(h).is_none() && h.as_str() != target)
        .collect();
    let present = table.header.iter().filter(|h| h.as_str() != target).count();
    if !extra.is_empty() || present != columns.len() {
        return Err(Error::invalid(format!(
            "model expects {} covariates ({}), file has {present} ({})",
            columns.len(),
            columns.names.join(", "),
            table
                .header
                .iter()
                .filter(|h| h.as_str() != target)
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let idx: Vec<usize> = columns
        .names
        .iter()
        .map(|n| column_index(path, &table.header, n))
        .collect::<Result<_>>()?;
    let mut data = Vec::with_capacity(table.rows.len() * idx.len());
    for (line, cells) in &table.rows {
        for &j in &idx {
            let cell = cells.get(j).map_or("", String::as_str);
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                csv_err(
                    path,
                    format!(
                        "column '{}': invalid value '{cell}' at line {line}",
                        table.header[j]
                    ),
                )
            })?;
            data.push(v);
        }
    }
    if table.rows.is_empty() {
        return Err(csv_err(path, "no usable rows"));
    }
    Matrix::new(table.rows.len(), idx.len(), data)
}

/// Writes covariates then the response, 17 significant digits per value.
pub fn write_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomic(path, |w| {
        let mut header = data.columns().names.clone();
        header.push(data.target_name().to_string());
        writeln!(w, "{}", header.join(","))?;
        for (row, y) in data.covariates().iter_rows().zip(data.response()) {
            let cells: Vec<String> = row.iter().chain([y]).map(|&v| fmt_f64(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    })
}
