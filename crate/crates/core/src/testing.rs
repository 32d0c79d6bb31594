//! Random trees, ensembles and points for property tests and validation.
//!
//! Trees are built on unit-sd columns, so a node's raw and effective slopes
//! are the same number.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{BoostEnsemble, ColumnMeta, Matrix, SmoothTree, SplitNode, Stage};
use crate::rng::Stream;

/// Unit-sd column metadata named `x1..xm`.
pub fn unit_columns(m: usize) -> ColumnMeta {
    ColumnMeta {
        names: (1..=m).map(|j| format!("x{j}")).collect(),
        sd: vec![1.0; m],
    }
}

/// A tree with `splits` parents grown by splitting a uniformly chosen
/// terminal each step. Slopes are drawn from `slope_range` and apply to
/// unit-sd columns, so raw and effective slopes coincide.
pub fn random_tree(rng: &mut Stream, m: usize, splits: usize, slope_range: (f64, f64)) -> SmoothTree {
    let mut terminals = vec![0usize];
    let mut parents = Vec::with_capacity(splits);
    for _ in 0..splits {
        let pick = rng.random_range(0..terminals.len());
        let pos = terminals.swap_remove(pick);
        let slope = rng.random_range(slope_range.0..=slope_range.1);
        parents.push(SplitNode {
            position: pos,
            variable: rng.random_range(0..m),
            location: rng.sample::<f64, _>(StandardNormal),
            slope,
            raw_gamma: slope,
        });
        terminals.push(2 * pos + 1);
        terminals.push(2 * pos + 2);
    }
    let leaves = terminals
        .into_iter()
        .map(|p| (p, rng.sample::<f64, _>(StandardNormal)))
        .collect();
    SmoothTree::from_parts(parents, leaves).expect("random tree is well formed")
}

pub fn random_ensemble(
    rng: &mut Stream,
    m: usize,
    trees: usize,
    shrinkage: f64,
    slope_range: (f64, f64),
) -> BoostEnsemble {
    let stages = (0..trees)
        .map(|_| {
            let splits = rng.random_range(1..=6);
            Stage {
                rho: rng.random_range(0.5..1.5),
                tree: random_tree(rng, m, splits, slope_range),
            }
        })
        .collect();
    BoostEnsemble::new(
        rng.sample(StandardNormal),
        shrinkage,
        stages,
        unit_columns(m),
        "y",
    )
    .expect("random ensemble is valid")
}

pub fn normal_points(rng: &mut Stream, n: usize, m: usize) -> Matrix {
    let data = (0..n * m).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::new(n, m, data).expect("shape matches")
}
