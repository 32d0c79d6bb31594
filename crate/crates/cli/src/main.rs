//! `stboost` command-line front end.
//!
//! Exit status: 0 on success, 1 when a command fails at run time, 2 for
//! usage errors including out-of-range flag values.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "stboost", version, about = "Boosted smooth transition regression trees")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "STBOOST_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelFlags {
    /// Boosting iterations.
    #[arg(long, default_value_t = 1000)]
    trees: usize,
    /// Splits per tree.
    #[arg(long, default_value_t = 4)]
    splits: usize,
    /// Lower end of the transition-slope draw range.
    #[arg(long, default_value_t = 0.5)]
    gamma_min: f64,
    /// Upper end of the transition-slope draw range.
    #[arg(long, default_value_t = 5.0)]
    gamma_max: f64,
    /// Shrinkage applied to every boosting update, in (0,1].
    #[arg(long, default_value_t = 0.2)]
    shrinkage: f64,
    /// Fraction of covariates tried at each split [default: 2/3].
    #[arg(long)]
    var_frac: Option<f64>,
    /// Number of candidate split locations per covariate.
    #[arg(long, default_value_t = 100)]
    grid: usize,
}

#[derive(Args, Debug, Clone)]
struct DataFlags {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Response column.
    #[arg(long)]
    target: String,
    /// Comma-separated covariate columns [default: all but the target].
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<String>>,
    /// Map text columns with two distinct values to 0/1.
    #[arg(long)]
    binary_text: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DgpArg {
    Cosine,
    Cubic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepArg {
    Shrinkage,
    Splits,
    Gamma,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model and save it.
    Train {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        /// Per-iteration RMSE and line-search trace (.json for JSON, CSV otherwise).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Predict every row of a feature file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fitted value and partial effect of one covariate per row.
    Derive {
        #[arg(long)]
        model: PathBuf,
        /// Feature file; not needed with --at.
        #[arg(long, required_unless_present = "at")]
        data: Option<PathBuf>,
        /// Covariate to differentiate with respect to.
        #[arg(long)]
        var: String,
        /// Evaluate at one comma-separated point in model column order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a synthetic dataset.
    Simulate {
        #[arg(long, value_enum)]
        dgp: DgpArg,
        #[arg(long)]
        n: usize,
        /// Signal share of variance, in (0,1).
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the noiseless signal and its x1 derivative.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// k-fold comparison of the mean, OLS and boosted models.
    Cv {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// In-sample RMSE traces across values of one hyperparameter.
    Trace {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, value_enum)]
        sweep: SweepArg,
        /// Comma-separated values; gamma ranges are written lo:hi.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
