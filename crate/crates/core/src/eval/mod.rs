//! Evaluation harness: error metrics, k-fold cross-validation against
//! benchmark learners, derivative-recovery metrics and hyperparameter sweeps.

mod cv;
mod learners;
mod recovery;
mod stats;
mod sweep;

pub use cv::{fold_partition, kfold_cv, relative_table, CvConfig, CvResult};
pub use learners::{
    benchmark_models, BoostLearner, ColumnTransform, Fitted, Learner, MeanLearner, OlsLearner,
    TransformedLearner,
};
pub use recovery::{central_window, derivative_recovery, derivative_recovery_from_estimates};
pub use stats::{paired_t_test, pearson, quantile, r_squared, rmse};
pub use sweep::{convergence_experiment, iterations_to_floor, SweepTrace, SweepValue};
