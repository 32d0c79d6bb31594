use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoostEnsemble, ColumnMeta, Leaf, PathCode, SmoothTree, SplitNode, Stage};

use super::write_atomic;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    target: String,
    baseline: f64,
    shrinkage: f64,
    columns: Vec<ColumnDoc>,
    stages: Vec<StageDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColumnDoc {
    name: String,
    sd: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StageDoc {
    rho: f64,
    parents: Vec<ParentDoc>,
    leaves: Vec<LeafDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParentDoc {
    position: usize,
    variable: usize,
    location: f64,
    slope: f64,
    raw_gamma: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafDoc {
    position: usize,
    weight: f64,
    /// `[parent position, code]` with code in {-1, 0, 1}.
    path: Vec<(usize, i8)>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<u32>,
}

fn to_doc(model: &BoostEnsemble) -> ModelDoc {
    let cols = model.columns();
    ModelDoc {
        format_version: FORMAT_VERSION,
        target: model.target_name().to_string(),
        baseline: model.baseline(),
        shrinkage: model.shrinkage(),
        columns: cols
            .names
            .iter()
            .zip(&cols.sd)
            .map(|(name, &sd)| ColumnDoc {
                name: name.clone(),
                sd,
            })
            .collect(),
        stages: model
            .stages()
            .iter()
            .map(|s| StageDoc {
                rho: s.rho,
                parents: s
                    .tree
                    .parents()
                    .iter()
                    .map(|p| ParentDoc {
                        position: p.position,
                        variable: p.variable,
                        location: p.location,
                        slope: p.slope,
                        raw_gamma: p.raw_gamma,
                    })
                    .collect(),
                leaves: s
                    .tree
                    .leaves()
                    .iter()
                    .map(|l| LeafDoc {
                        position: l.position,
                        weight: l.weight,
                        path: l.path_codes.iter().map(|(&j, c)| (j, c.value())).collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn corrupt(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) | Error::DegenerateData(msg) => Error::CorruptModel(msg),
        other => other,
    }
}

fn from_doc(doc: ModelDoc) -> Result<BoostEnsemble> {
    let columns = ColumnMeta {
        names: doc.columns.iter().map(|c| c.name.clone()).collect(),
        sd: doc.columns.iter().map(|c| c.sd).collect(),
    };
    let mut stages = Vec::with_capacity(doc.stages.len());
    for (m, s) in doc.stages.into_iter().enumerate() {
        let parents = s
            .parents
            .into_iter()
            .map(|p| SplitNode {
                position: p.position,
                variable: p.variable,
                location: p.location,
                slope: p.slope,
                raw_gamma: p.raw_gamma,
            })
            .collect();
        let leaves = s
            .leaves
            .into_iter()
            .map(|l| {
                let path_codes = l
                    .path
                    .into_iter()
                    .map(|(j, v)| {
                        PathCode::from_value(v).map(|c| (j, c)).ok_or_else(|| {
                            Error::CorruptModel(format!(
                                "stage {m} leaf {}: path code {v} is not -1, 0 or 1",
                                l.position
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Leaf {
                    position: l.position,
                    weight: l.weight,
                    path_codes,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let tree = SmoothTree::new(parents, leaves)
            .map_err(|e| corrupt(e).prefixed(&format!("stage {m}: ")))?;
        stages.push(Stage { rho: s.rho, tree });
    }
    BoostEnsemble::new(doc.baseline, doc.shrinkage, stages, columns, doc.target).map_err(corrupt)
}

impl Error {
    fn prefixed(self, prefix: &str) -> Error {
        match self {
            Error::CorruptModel(msg) => Error::CorruptModel(format!("{prefix}{msg}")),
            other => other,
        }
    }
}

/// Pretty-printed JSON document describing the model.
pub fn model_to_string(model: &BoostEnsemble) -> Result<String> {
    serde_json::to_string_pretty(&to_doc(model))
        .map_err(|e| Error::CorruptModel(format!("serialization failed: {e}")))
}

/// Parses a model document, checking the format version before anything else.
pub fn model_from_str(text: &str) -> Result<BoostEnsemble> {
    let probe: VersionProbe = serde_json::from_str(text)
        .map_err(|e| Error::CorruptModel(format!("not a model document: {e}")))?;
    match probe.format_version {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(Error::UnsupportedVersion {
                found,
                supported: FORMAT_VERSION,
            })
        }
        None => return Err(Error::CorruptModel("missing format_version".into())),
    }
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    from_doc(doc)
}

pub fn save_model(model: &BoostEnsemble, path: impl AsRef<Path>) -> Result<()> {
    let text = model_to_string(model)?;
    write_atomic(path.as_ref(), |w| {
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<BoostEnsemble> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}
