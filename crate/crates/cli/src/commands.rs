use std::fmt;
use std::path::Path;

use stboost::eval::{
    benchmark_models, convergence_experiment, kfold_cv, BoostLearner, CvConfig, Learner,
    SweepValue,
};
use stboost::io::{
    export_results, load_model, read_csv_with, read_features, save_model, write_columns,
    write_dataset, write_predictions, CsvOptions, ExportFormat, Exportable, PartialEffectTable,
};
use stboost::sim::{generate, Dgp, SimSpec};
use stboost::{
    ensemble_partial, ensemble_predict, fit, Dataset, Hyperparameters, Matrix,
    PartialEffectRequest,
};

use crate::{Command, DataFlags, DgpArg, ModelFlags, SweepArg};

pub enum CliError {
    /// Bad flag values; reported with exit status 2.
    Usage(String),
    Run(stboost::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<stboost::Error> for CliError {
    fn from(e: stboost::Error) -> Self {
        CliError::Run(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: stboost::Error) -> CliError {
    match e {
        stboost::Error::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::Run(other),
    }
}

fn params(flags: &ModelFlags, seed: u64) -> CliResult<Hyperparameters> {
    let mut p = Hyperparameters::default()
        .with_num_trees(flags.trees)
        .and_then(|p| p.with_splits_per_tree(flags.splits))
        .and_then(|p| p.with_gamma_range(flags.gamma_min, flags.gamma_max))
        .and_then(|p| p.with_shrinkage(flags.shrinkage))
        .and_then(|p| p.with_threshold_grid(flags.grid))
        .map_err(usage)?;
    if let Some(f) = flags.var_frac {
        p = p.with_variable_fraction(f).map_err(usage)?;
    }
    Ok(p.with_seed(seed))
}

fn load(flags: &DataFlags) -> CliResult<Dataset> {
    let load = read_csv_with(
        &flags.data,
        &CsvOptions {
            target: flags.target.clone(),
            features: flags.features.clone(),
            binary_text: flags.binary_text,
        },
    )?;
    if load.dropped_rows > 0 {
        eprintln!(
            "note: dropped {} row(s) with missing cells",
            load.dropped_rows
        );
    }
    for (col, zero, one) in &load.binary_columns {
        eprintln!("note: column '{col}' mapped {zero} -> 0, {one} -> 1");
    }
    let d = load.dataset;
    for (name, sd) in d.columns().names.iter().zip(d.column_sd()) {
        if *sd == 0.0 {
            eprintln!("note: column '{name}' is constant and will not be split on");
        }
    }
    Ok(d)
}

fn format_for(path: &Path) -> ExportFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => ExportFormat::Structured,
        _ => ExportFormat::Csv,
    }
}

fn sweep_values(kind: SweepArg, raw: &[String]) -> CliResult<Vec<SweepValue>> {
    let bad = |v: &str, what: &str| CliError::Usage(format!("invalid {what} value '{v}'"));
    raw.iter()
        .map(|v| {
            let v = v.trim();
            Ok(match kind {
                SweepArg::Shrinkage => {
                    SweepValue::Shrinkage(v.parse().map_err(|_| bad(v, "shrinkage"))?)
                }
                SweepArg::Splits => SweepValue::Splits(v.parse().map_err(|_| bad(v, "splits"))?),
                SweepArg::Gamma => {
                    let (lo, hi) = v
                        .split_once(':')
                        .ok_or_else(|| bad(v, "gamma range (expected lo:hi)"))?;
                    SweepValue::GammaRange(
                        lo.parse().map_err(|_| bad(v, "gamma range"))?,
                        hi.parse().map_err(|_| bad(v, "gamma range"))?,
                    )
                }
            })
        })
        .collect()
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Train {
            data,
            model,
            seed,
            out,
            report,
        } => {
            let p = params(&model, seed)?;
            let d = load(&data)?;
            let (ens, rep) = fit(&d, &p)?;
            save_model(&ens, &out)?;
            if let Some(r) = report {
                export_results(Exportable::Fit(&rep), format_for(&r), &r)?;
            }
            eprintln!(
                "trained {} trees on {} rows in {:.2}s; final in-sample RMSE {:.6}",
                p.num_trees(),
                d.n_rows(),
                rep.wall_time,
                rep.rmse_trace.last().copied().unwrap_or(f64::NAN)
            );
            Ok(())
        }
        Command::Predict { model, data, out } => {
            let m = load_model(&model)?;
            let x = read_features(&data, m.columns(), m.target_name())?;
            let pred = ensemble_predict(&m, &x)?;
            write_predictions(&pred, &out)?;
            Ok(())
        }
        Command::Derive {
            model,
            data,
            var,
            at,
            out,
        } => {
            let m = load_model(&model)?;
            let s = m.columns().index_of(&var).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown covariate '{var}' (model columns: {})",
                    m.columns().names.join(", ")
                ))
            })?;
            let points = match (at, data) {
                (Some(point), _) => {
                    if point.len() != m.n_features() {
                        return Err(CliError::Usage(format!(
                            "--at needs {} values ({}), got {}",
                            m.n_features(),
                            m.columns().names.join(", "),
                            point.len()
                        )));
                    }
                    Matrix::new(1, point.len(), point)?
                }
                (None, Some(path)) => read_features(&path, m.columns(), m.target_name())?,
                (None, None) => return Err(CliError::Usage("derive needs --data or --at".into())),
            };
            let fitted = ensemble_predict(&m, &points)?;
            let partial = ensemble_partial(&m, &PartialEffectRequest::new(points.clone(), s)?)?;
            let table = PartialEffectTable {
                column_names: m.columns().names.clone(),
                variable: var,
                points,
                fitted,
                partial,
            };
            export_results(Exportable::Partial(&table), format_for(&out), &out)?;
            Ok(())
        }
        Command::Simulate {
            dgp,
            n,
            r2,
            seed,
            out,
            truth,
        } => {
            let dgp = match dgp {
                DgpArg::Cosine => Dgp::Cosine,
                DgpArg::Cubic => Dgp::Cubic,
            };
            let spec = SimSpec::new(dgp, n, r2, seed).map_err(usage)?;
            let sim = generate(&spec)?;
            write_dataset(&sim.data, &out)?;
            if let Some(t) = truth {
                write_columns(&t, &["f", "df_dx1"], &[&sim.truth, &sim.true_partial])?;
            }
            eprintln!("simulated {n} rows, noise sd {:.6}", sim.sigma);
            Ok(())
        }
        Command::Cv {
            data,
            model,
            k,
            seed,
            out,
        } => {
            let p = params(&model, seed)?;
            if k < 2 {
                return Err(CliError::Usage(format!("k must be at least 2, got {k}")));
            }
            let d = load(&data)?;
            if k > d.n_rows() {
                return Err(CliError::Usage(format!(
                    "k must not exceed the {} usable rows, got {k}",
                    d.n_rows()
                )));
            }
            let mut models: Vec<Box<dyn Learner>> = benchmark_models();
            models.push(Box::new(BoostLearner::new("boost", p)));
            let config = CvConfig {
                k,
                reference: "mean".into(),
                champion: "boost".into(),
                seed,
            };
            let result = kfold_cv(&d, &models, &config)?;
            for (name, notes) in &result.notes {
                for n in notes {
                    eprintln!("note: {name}: {n}");
                }
            }
            export_results(Exportable::Cv(&result), format_for(&out), &out)?;
            Ok(())
        }
        Command::Trace {
            data,
            model,
            sweep,
            values,
            seed,
            out,
        } => {
            let base = params(&model, seed)?;
            let grid = sweep_values(sweep, &values)?;
            for v in &grid {
                v.apply(&base).map_err(usage)?;
            }
            let d = load(&data)?;
            let traces = convergence_experiment(&d, &base, &grid)?;
            export_results(Exportable::Sweep(&traces), format_for(&out), &out)?;
            Ok(())
        }
    }
}
