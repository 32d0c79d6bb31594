use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

use super::logistic::logistic_unchecked;

/// Position of the leaf relative to one parent node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathCode {
    /// The parent is not an ancestor of the leaf (`-1`).
    Off,
    /// The path goes through the parent's child at `2j + 2` (`0`).
    Right,
    /// The path goes through the parent's child at `2j + 1` (`+1`).
    Left,
}

impl PathCode {
    pub fn value(self) -> i8 {
        match self {
            PathCode::Off => -1,
            PathCode::Right => 0,
            PathCode::Left => 1,
        }
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            -1 => Some(PathCode::Off),
            0 => Some(PathCode::Right),
            1 => Some(PathCode::Left),
            _ => None,
        }
    }

    /// Exponents `(n(1+n)/2, (1-n)(1+n))` applied to `L` and `1 - L` in the
    /// leaf basis product.
    pub fn exponents(self) -> (i32, i32) {
        let n = i32::from(self.value());
        (n * (1 + n) / 2, (1 - n) * (1 + n))
    }
}

pub(crate) fn left_child(position: usize) -> Option<usize> {
    position.checked_mul(2)?.checked_add(1)
}

pub(crate) fn right_child(position: usize) -> Option<usize> {
    position.checked_mul(2)?.checked_add(2)
}

fn parent_of(position: usize) -> Option<usize> {
    (position > 0).then(|| (position - 1) / 2)
}

/// A logistic split. `slope` is the effective transition slope, already
/// divided by the training standard deviation of `variable`; `raw_gamma` is
/// the value drawn before scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitNode {
    pub position: usize,
    pub variable: usize,
    pub location: f64,
    pub slope: f64,
    pub raw_gamma: f64,
}

impl SplitNode {
    #[inline]
    pub(crate) fn transition(&self, point: &[f64]) -> f64 {
        logistic_unchecked(point[self.variable], self.slope, self.location)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub position: usize,
    pub weight: f64,
    /// One entry per parent node of the tree.
    pub path_codes: BTreeMap<usize, PathCode>,
}

impl Leaf {
    pub fn code(&self, parent: usize) -> PathCode {
        self.path_codes
            .get(&parent)
            .copied()
            .unwrap_or(PathCode::Off)
    }

    /// Parents on the path from the root to this leaf.
    pub fn ancestors(&self) -> impl Iterator<Item = usize> + '_ {
        self.path_codes
            .iter()
            .filter(|(_, c)| **c != PathCode::Off)
            .map(|(j, _)| *j)
    }
}

/// Expected path codes of the leaf at `position` given the tree's parents.
fn path_codes_for(position: usize, parents: &[SplitNode]) -> BTreeMap<usize, PathCode> {
    let mut codes: BTreeMap<usize, PathCode> =
        parents.iter().map(|p| (p.position, PathCode::Off)).collect();
    let mut node = position;
    while let Some(p) = parent_of(node) {
        let code = if node % 2 == 1 {
            PathCode::Left
        } else {
            PathCode::Right
        };
        codes.insert(p, code);
        node = p;
    }
    codes
}

#[derive(Debug, Clone, PartialEq)]
struct Step {
    parent: usize,
    src: usize,
    left: usize,
    right: usize,
}

/// A smooth transition regression tree: logistic parents and weighted leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTree {
    parents: Vec<SplitNode>,
    leaves: Vec<Leaf>,
    // top-down evaluation order over node-mass slots
    plan: Vec<Step>,
    leaf_slots: Vec<usize>,
    n_slots: usize,
    min_dim: usize,
}

impl SmoothTree {
    /// Builds a tree from parents and `(position, weight)` leaves, deriving
    /// the path codes from the positions.
    pub fn from_parts(parents: Vec<SplitNode>, leaves: Vec<(usize, f64)>) -> Result<Self> {
        let leaves = leaves
            .into_iter()
            .map(|(position, weight)| Leaf {
                position,
                weight,
                path_codes: path_codes_for(position, &parents),
            })
            .collect();
        Self::new(parents, leaves)
    }

    /// One leaf, no splits.
    pub fn constant(weight: f64) -> Result<Self> {
        Self::from_parts(Vec::new(), vec![(0, weight)])
    }

    /// Validates node indexing, path codes and parameter ranges.
    pub fn new(mut parents: Vec<SplitNode>, mut leaves: Vec<Leaf>) -> Result<Self> {
        parents.sort_by_key(|p| p.position);
        leaves.sort_by_key(|l| l.position);

        let mut kinds: HashMap<usize, bool> = HashMap::new(); // true = parent
        for p in &parents {
            if kinds.insert(p.position, true).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate parent position {}",
                    p.position
                )));
            }
            if !(p.slope.is_finite() && p.slope > 0.0) {
                return Err(Error::invalid(format!(
                    "parent {} has non-positive slope {}",
                    p.position, p.slope
                )));
            }
            if !(p.raw_gamma.is_finite() && p.raw_gamma > 0.0) {
                return Err(Error::invalid(format!(
                    "parent {} has non-positive raw gamma {}",
                    p.position, p.raw_gamma
                )));
            }
            if !p.location.is_finite() {
                return Err(Error::invalid(format!(
                    "parent {} has non-finite location",
                    p.position
                )));
            }
        }
        for l in &leaves {
            if kinds.insert(l.position, false).is_some() {
                return Err(Error::invalid(format!(
                    "position {} used by more than one node",
                    l.position
                )));
            }
            if !l.weight.is_finite() {
                return Err(Error::invalid(format!(
                    "leaf {} has non-finite weight",
                    l.position
                )));
            }
        }
        if leaves.len() != parents.len() + 1 {
            return Err(Error::invalid(format!(
                "{} leaves for {} parents; expected one more leaf than parents",
                leaves.len(),
                parents.len()
            )));
        }
        if !kinds.contains_key(&0) {
            return Err(Error::invalid("tree has no root at position 0"));
        }
        // every non-root node hangs off a parent
        for (&pos, _) in kinds.iter() {
            if let Some(up) = parent_of(pos) {
                if kinds.get(&up) != Some(&true) {
                    return Err(Error::invalid(format!(
                        "node {pos} has no parent at position {up}"
                    )));
                }
            }
        }

        let mut positions: Vec<usize> = kinds.keys().copied().collect();
        positions.sort_unstable();
        let slot: HashMap<usize, usize> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let mut plan = Vec::with_capacity(parents.len());
        for (idx, p) in parents.iter().enumerate() {
            let (l, r) = match (left_child(p.position), right_child(p.position)) {
                (Some(l), Some(r)) => (l, r),
                _ => {
                    return Err(Error::invalid(format!(
                        "children of node {} overflow the position range",
                        p.position
                    )))
                }
            };
            let (Some(&left), Some(&right)) = (slot.get(&l), slot.get(&r)) else {
                return Err(Error::invalid(format!(
                    "parent {} is missing a child",
                    p.position
                )));
            };
            plan.push(Step {
                parent: idx,
                src: slot[&p.position],
                left,
                right,
            });
        }

        for l in &leaves {
            let expected = path_codes_for(l.position, &parents);
            if l.path_codes != expected {
                return Err(Error::invalid(format!(
                    "leaf {} path codes do not match the tree structure",
                    l.position
                )));
            }
        }

        let leaf_slots = leaves.iter().map(|l| slot[&l.position]).collect();
        let min_dim = parents.iter().map(|p| p.variable + 1).max().unwrap_or(0);
        Ok(Self {
            parents,
            leaves,
            plan,
            leaf_slots,
            n_slots: positions.len(),
            min_dim,
        })
    }

    pub fn parents(&self) -> &[SplitNode] {
        &self.parents
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn parent_at(&self, position: usize) -> Option<&SplitNode> {
        self.parents
            .binary_search_by_key(&position, |p| p.position)
            .ok()
            .map(|i| &self.parents[i])
    }

    /// Smallest point dimension the tree can be evaluated on.
    pub fn min_dim(&self) -> usize {
        self.min_dim
    }

    /// Same structure with every leaf weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> SmoothTree {
        let mut out = self.clone();
        for l in &mut out.leaves {
            l.weight = f(l.weight);
        }
        out
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() < self.min_dim {
            return Err(Error::invalid(format!(
                "point has {} coordinates but the tree splits on column {}",
                point.len(),
                self.min_dim - 1
            )));
        }
        Ok(())
    }

    /// Fills `masses` with the basis weight of every node, top-down.
    fn node_masses(&self, point: &[f64], masses: &mut Vec<f64>) {
        masses.clear();
        masses.resize(self.n_slots, 0.0);
        masses[0] = 1.0;
        for step in &self.plan {
            let l = self.parents[step.parent].transition(point);
            let m = masses[step.src];
            masses[step.left] = m * l;
            masses[step.right] = m * (1.0 - l);
        }
    }

    pub(crate) fn eval_with(&self, point: &[f64], buf: &mut Vec<f64>) -> f64 {
        self.node_masses(point, buf);
        self.leaves
            .iter()
            .zip(&self.leaf_slots)
            .map(|(leaf, &s)| leaf.weight * buf[s])
            .sum()
    }

    /// Partial derivative with respect to `variable`, by forward propagation
    /// of (mass, d mass) pairs down the tree.
    pub(crate) fn partial_with(
        &self,
        point: &[f64],
        variable: usize,
        buf: &mut Vec<(f64, f64)>,
    ) -> f64 {
        buf.clear();
        buf.resize(self.n_slots, (0.0, 0.0));
        buf[0] = (1.0, 0.0);
        for step in &self.plan {
            let node = &self.parents[step.parent];
            let l = node.transition(point);
            let dl = if node.variable == variable {
                node.slope * l * (1.0 - l)
            } else {
                0.0
            };
            let (m, dm) = buf[step.src];
            buf[step.left] = (m * l, dm * l + m * dl);
            buf[step.right] = (m * (1.0 - l), dm * (1.0 - l) - m * dl);
        }
        self.leaves
            .iter()
            .zip(&self.leaf_slots)
            .map(|(leaf, &s)| leaf.weight * buf[s].1)
            .sum()
    }
}

/// Basis weight of `leaf` at `point`: the product over parents of `L` for
/// code `+1`, `1 - L` for code `0` and `1` for code `-1`.
pub fn leaf_basis(tree: &SmoothTree, leaf: &Leaf, point: &[f64]) -> Result<f64> {
    tree.check_point(point)?;
    if !tree.leaves.iter().any(|l| l == leaf) {
        return Err(Error::invalid(format!(
            "leaf {} does not belong to this tree",
            leaf.position
        )));
    }
    let mut basis = 1.0;
    for (&j, &code) in &leaf.path_codes {
        let (a, b) = code.exponents();
        if a == 0 && b == 0 {
            continue;
        }
        let parent = tree
            .parent_at(j)
            .ok_or_else(|| Error::invalid(format!("unknown parent {j}")))?;
        let l = parent.transition(point);
        basis *= l.powi(a) * (1.0 - l).powi(b);
    }
    Ok(basis)
}

/// Tree output `Σ_k β_k B_k(point)`.
pub fn tree_predict(tree: &SmoothTree, point: &[f64]) -> Result<f64> {
    tree.check_point(point)?;
    let mut buf = Vec::new();
    Ok(tree.eval_with(point, &mut buf))
}
