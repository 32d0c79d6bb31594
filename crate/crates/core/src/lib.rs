//! Gradient boosting with smooth transition regression trees.
//!
//! Every split in a tree is a logistic transition instead of an indicator, so
//! a fitted ensemble is a smooth function of its covariates. Besides
//! predictions, the crate computes the exact partial effect of any covariate
//! on the fitted output.
//!
//! Module map:
//!
//! * [`model`]: data types and the pure evaluation functions.
//! * [`grow`]: greedy growth of a single smooth tree.
//! * [`boost`]: the boosting loop with closed-form line search and shrinkage.
//! * [`partial`]: analytical partial effects and a finite-difference check.
//! * [`sim`]: synthetic data generators with noise calibrated to a target R².
//! * [`eval`]: RMSE, k-fold cross-validation and experiment sweeps.
//! * [`io`]: CSV ingestion, model persistence and result export.
//!
//! ```
//! use stboost::sim::{generate, Dgp, SimSpec};
//! use stboost::{ensemble_partial, fit, Hyperparameters, PartialEffectRequest};
//!
//! let sim = generate(&SimSpec::new(Dgp::Cosine, 200, 0.9, 1)?)?;
//! let params = Hyperparameters::default().with_num_trees(50)?.with_seed(3);
//! let (model, report) = fit(&sim.data, &params)?;
//! assert!(report.rmse_trace.last() < report.rmse_trace.first());
//!
//! let points = sim.data.covariates().clone();
//! let effect = ensemble_partial(&model, &PartialEffectRequest::new(points, 0)?)?;
//! assert_eq!(effect.len(), 200);
//! # Ok::<(), stboost::Error>(())
//! ```

pub mod boost;
pub mod error;
pub mod eval;
pub mod grow;
pub mod io;
pub mod model;
pub mod partial;
pub mod rng;
pub mod sim;
pub mod testing;

pub use boost::{fit, line_search, FitReport};
pub use error::{Error, Result};
pub use model::{
    ensemble_predict, leaf_basis, logistic, logistic_derivative, tree_predict, BoostEnsemble,
    ColumnMeta, Dataset, Hyperparameters, Leaf, Matrix, PathCode, SmoothTree, SplitNode,
};
pub use partial::{ensemble_partial, finite_difference_check, tree_partial, PartialEffectRequest};
