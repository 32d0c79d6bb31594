//! Model data types and the pure functions that evaluate them.

mod dataset;
mod ensemble;
mod logistic;
mod params;
pub(crate) mod tree;

pub use dataset::{sample_sd, ColumnMeta, Dataset, Matrix};
pub use ensemble::{ensemble_predict, BoostEnsemble, Stage};
pub use logistic::{logistic, logistic_derivative, EXPONENT_CLAMP, SATURATION_FLOOR};
pub(crate) use logistic::logistic_unchecked;
pub use params::{Hyperparameters, DEFAULT_GAMMA_RANGE};
pub use tree::{leaf_basis, tree_predict, Leaf, PathCode, SmoothTree, SplitNode};
