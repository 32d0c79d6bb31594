//! CSV ingestion, model persistence and result export.
//!
//! Every writer goes through a temporary file in the destination directory
//! that is renamed into place only after the write succeeded, so a failed
//! command never leaves a partial file behind.

mod csv;
mod export;
mod model_file;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use self::csv::{read_csv, read_csv_with, read_features, write_dataset, CsvLoad, CsvOptions};
pub use export::{
    export_results, write_predictions, ExportFormat, Exportable, PartialEffectTable,
};
pub use model_file::{load_model, model_from_str, model_to_string, save_model, FORMAT_VERSION};

use crate::error::{Error, Result};

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes equal-length columns under `header` as CSV.
pub fn write_columns(path: impl AsRef<Path>, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if header.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
        return Err(Error::invalid("column writer needs one header per equal-length column"));
    }
    if let Some(v) = columns.iter().flat_map(|c| c.iter()).find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("cannot export non-finite value {v}")));
    }
    write_atomic(path.as_ref(), |w| {
        writeln!(w, "{}", header.join(","))?;
        for i in 0..n {
            let row: Vec<String> = columns.iter().map(|c| fmt_f64(c[i])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

pub(crate) fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<&File>) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
