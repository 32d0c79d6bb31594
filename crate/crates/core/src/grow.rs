//! Greedy growth of a single smooth transition regression tree.
//!
//! Each split step scans every current terminal node, a random subset of the
//! eligible covariates and a grid of candidate locations. For every triple the
//! two new leaf weights are solved in closed form with all other leaf weights
//! frozen, and the candidate is scored by the sum of squared errors of the
//! whole tree. Unlike a hard tree, every terminal node sees every observation,
//! so the search cannot be split into independent branches.

use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::tree::{left_child, right_child};
use crate::model::{logistic_unchecked, Dataset, SmoothTree, SplitNode};
use crate::rng::Stream;

/// Ridge added to the diagonal of the 2x2 leaf-weight normal equations.
pub const LEAF_RIDGE: f64 = 1e-10;

/// How candidate split locations are generated per column.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdRule {
    /// `g` equally spaced interior quantiles of the training column, or all
    /// unique values when the column has at most `g` of them.
    Quantiles(usize),
    /// Midpoints between consecutive unique values.
    Midpoints,
    /// Caller-supplied locations, one list per column.
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    /// Number of split operations; the tree ends with `splits + 1` leaves.
    pub splits: usize,
    pub gamma_range: (f64, f64),
    pub variable_fraction: f64,
    pub thresholds: ThresholdRule,
}

impl GrowthConfig {
    fn validate(&self) -> Result<()> {
        if self.splits == 0 {
            return Err(Error::invalid("a tree needs at least one split"));
        }
        let (lo, hi) = self.gamma_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::invalid(format!(
                "gamma range must satisfy 0 < gamma_min ≤ gamma_max, got [{lo}, {hi}]"
            )));
        }
        if !(self.variable_fraction > 0.0 && self.variable_fraction <= 1.0) {
            return Err(Error::invalid("variable fraction ∈ (0,1]"));
        }
        if let ThresholdRule::Quantiles(0) = self.thresholds {
            return Err(Error::invalid("threshold grid must be a positive integer"));
        }
        Ok(())
    }
}

/// A scored split proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub node: usize,
    pub variable: usize,
    pub location: f64,
    pub slope: f64,
    pub raw_gamma: f64,
    pub beta_left: f64,
    pub beta_right: f64,
    pub sse: f64,
}

impl SplitCandidate {
    /// Lowest SSE first, then lowest node position, variable and location.
    fn rank(&self, other: &Self) -> Ordering {
        self.sse
            .total_cmp(&other.sse)
            .then(self.node.cmp(&other.node))
            .then(self.variable.cmp(&other.variable))
            .then(self.location.total_cmp(&other.location))
    }
}

/// Closed-form leaf weights for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafSolution {
    pub beta_left: f64,
    pub beta_right: f64,
    pub sse: f64,
}

/// Sufficient statistics of the two-column least-squares problem.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    ll: f64,
    lr: f64,
    rr: f64,
    ly: f64,
    ry: f64,
    yy: f64,
}

impl Moments {
    fn solve(&self) -> Option<(f64, f64)> {
        if self.ll == 0.0 && self.rr == 0.0 {
            return None;
        }
        let a = self.ll + LEAF_RIDGE;
        let d = self.rr + LEAF_RIDGE;
        let det = a * d - self.lr * self.lr;
        if !(det > 0.0 && det.is_finite()) {
            return None;
        }
        let bl = (self.ly * d - self.lr * self.ry) / det;
        let br = (a * self.ry - self.lr * self.ly) / det;
        (bl.is_finite() && br.is_finite()).then_some((bl, br))
    }

    fn sse(&self, bl: f64, br: f64) -> f64 {
        let v = self.yy - 2.0 * (bl * self.ly + br * self.ry)
            + bl * bl * self.ll
            + 2.0 * bl * br * self.lr
            + br * br * self.rr;
        v.max(0.0)
    }
}

/// Minimizes `Σ (targets - offset - βL wL - βR wR)²` through the ridged 2x2
/// normal equations. `None` marks a degenerate candidate (both weight columns
/// identically zero, or a singular system).
pub fn solve_leaf_weights(
    w_left: &[f64],
    w_right: &[f64],
    offset: &[f64],
    targets: &[f64],
) -> Result<Option<LeafSolution>> {
    let n = targets.len();
    if w_left.len() != n || w_right.len() != n || offset.len() != n {
        return Err(Error::invalid("leaf weight inputs must share one length"));
    }
    let mut m = Moments::default();
    for i in 0..n {
        let (wl, wr, r) = (w_left[i], w_right[i], targets[i] - offset[i]);
        m.ll += wl * wl;
        m.lr += wl * wr;
        m.rr += wr * wr;
        m.ly += wl * r;
        m.ry += wr * r;
        m.yy += r * r;
    }
    let Some((beta_left, beta_right)) = m.solve() else {
        return Ok(None);
    };
    let sse = (0..n)
        .map(|i| (targets[i] - offset[i] - beta_left * w_left[i] - beta_right * w_right[i]).powi(2))
        .sum();
    Ok(Some(LeafSolution {
        beta_left,
        beta_right,
        sse,
    }))
}

/// Draws a raw transition parameter uniformly from `gamma_range` and scales
/// it by the column standard deviation. Returns `(raw, effective)`.
pub fn draw_slope(rng: &mut Stream, gamma_range: (f64, f64), column_sd: f64) -> (f64, f64) {
    let (lo, hi) = gamma_range;
    let raw = if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    };
    (raw, raw / column_sd)
}

/// Terminal node of a tree under construction.
#[derive(Debug, Clone)]
pub struct Terminal {
    pub position: usize,
    pub weight: f64,
    /// Basis weight of this node at every training row.
    pub mass: Vec<f64>,
}

/// Parents, terminals and fitted values of a partially grown tree.
#[derive(Debug, Clone)]
pub struct GrowthState {
    pub parents: Vec<SplitNode>,
    pub terminals: Vec<Terminal>,
    pub fitted: Vec<f64>,
}

impl GrowthState {
    /// Empty tree over `n` rows: a single terminal at the root with weight 0.
    pub fn root(n: usize) -> Self {
        Self {
            parents: Vec::new(),
            terminals: vec![Terminal {
                position: 0,
                weight: 0.0,
                mass: vec![1.0; n],
            }],
            fitted: vec![0.0; n],
        }
    }

    pub fn sse(&self, targets: &[f64]) -> f64 {
        targets
            .iter()
            .zip(&self.fitted)
            .map(|(y, f)| (y - f).powi(2))
            .sum()
    }

    pub fn into_tree(self) -> Result<SmoothTree> {
        let leaves = self
            .terminals
            .into_iter()
            .map(|t| (t.position, t.weight))
            .collect();
        SmoothTree::from_parts(self.parents, leaves)
    }
}

/// A grown tree together with its training-set outputs.
#[derive(Debug, Clone)]
pub struct GrownTree {
    pub tree: SmoothTree,
    /// `tree_predict` at every training row.
    pub fitted: Vec<f64>,
    /// In-sample SSE after each split.
    pub sse_trace: Vec<f64>,
}

/// Per-dataset precomputation shared by every tree grown on the same data.
#[derive(Debug, Clone)]
pub struct Grower<'a> {
    data: &'a Dataset,
    config: GrowthConfig,
    columns: Vec<Vec<f64>>,
    thresholds: Vec<Vec<f64>>,
    eligible: Vec<usize>,
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Linear-interpolation quantile of sorted data at probability `p`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `grid` equally spaced interior quantiles of `column`, or its unique values
/// when there are no more than `grid` of them.
pub fn threshold_grid(column: &[f64], grid: usize) -> Vec<f64> {
    let unique = sorted_unique(column);
    if unique.len() <= grid {
        return unique;
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = (1..=grid)
        .map(|i| quantile_sorted(&sorted, i as f64 / (grid + 1) as f64))
        .collect();
    out.dedup();
    out
}

pub fn midpoint_grid(column: &[f64]) -> Vec<f64> {
    let unique = sorted_unique(column);
    unique.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

impl<'a> Grower<'a> {
    pub fn new(data: &'a Dataset, config: GrowthConfig) -> Result<Self> {
        config.validate()?;
        let m = data.n_cols();
        let columns: Vec<Vec<f64>> = (0..m).map(|j| data.covariates().column(j)).collect();
        let thresholds = match &config.thresholds {
            ThresholdRule::Quantiles(g) => columns.iter().map(|c| threshold_grid(c, *g)).collect(),
            ThresholdRule::Midpoints => columns.iter().map(|c| midpoint_grid(c)).collect(),
            ThresholdRule::Explicit(lists) => {
                if lists.len() != m {
                    return Err(Error::invalid(format!(
                        "{} threshold lists for {m} columns",
                        lists.len()
                    )));
                }
                if lists.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("threshold locations must be finite"));
                }
                lists.clone()
            }
        };
        let eligible = data
            .columns()
            .eligible()
            .into_iter()
            .filter(|&s| !thresholds[s].is_empty())
            .collect();
        Ok(Self {
            data,
            config,
            columns,
            thresholds,
            eligible,
        })
    }

    pub fn config(&self) -> &GrowthConfig {
        &self.config
    }

    /// Candidate locations used for column `s`.
    pub fn thresholds(&self, s: usize) -> &[f64] {
        &self.thresholds[s]
    }

    /// Columns that may carry a split: positive standard deviation and at
    /// least one candidate location.
    pub fn eligible(&self) -> &[usize] {
        &self.eligible
    }

    /// Number of covariates tried per split step.
    pub fn variables_per_step(&self) -> usize {
        let m = self.eligible.len();
        let k = (self.config.variable_fraction * m as f64 - 1e-9).ceil() as usize;
        k.clamp(1, m.max(1))
    }

    fn check_targets(&self, targets: &[f64]) -> Result<()> {
        if self.data.n_rows() < 2 {
            return Err(Error::invalid("growing a tree needs at least two rows"));
        }
        if targets.len() != self.data.n_rows() {
            return Err(Error::invalid(format!(
                "{} targets for {} rows",
                targets.len(),
                self.data.n_rows()
            )));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("targets must be finite"));
        }
        if self.eligible.is_empty() {
            return Err(Error::DegenerateData(
                "no covariate has positive variance".into(),
            ));
        }
        Ok(())
    }

    /// Finds the SSE-minimizing split of the current tree.
    ///
    /// Random draws (the variable subset, then one raw transition parameter
    /// per selected variable) are taken serially before the parallel scan,
    /// and the scan is reduced with a total order, so the result does not
    /// depend on scheduling.
    pub fn search_best_split(
        &self,
        state: &GrowthState,
        targets: &[f64],
        rng: &mut Stream,
    ) -> Result<SplitCandidate> {
        self.check_targets(targets)?;
        let n = targets.len();
        let k = self.variables_per_step();
        let mut chosen: Vec<usize> = index::sample(rng, self.eligible.len(), k)
            .into_iter()
            .map(|i| self.eligible[i])
            .collect();
        chosen.sort_unstable();
        let sd = self.data.column_sd();
        let slopes: Vec<(usize, f64, f64)> = chosen
            .iter()
            .map(|&s| {
                let (raw, eff) = draw_slope(rng, self.config.gamma_range, sd[s]);
                (s, raw, eff)
            })
            .collect();

        // residual target of each terminal once its own contribution is removed
        let splittable: Vec<&Terminal> = state
            .terminals
            .iter()
            .filter(|t| right_child(t.position).is_some())
            .collect();
        let partial: Vec<(Vec<f64>, f64)> = splittable
            .iter()
            .map(|t| {
                let r: Vec<f64> = (0..n)
                    .map(|i| targets[i] - (state.fitted[i] - t.weight * t.mass[i]))
                    .collect();
                let yy = r.iter().map(|v| v * v).sum();
                (r, yy)
            })
            .collect();

        let units: Vec<(usize, usize)> = slopes
            .iter()
            .enumerate()
            .flat_map(|(v, &(s, _, _))| (0..self.thresholds[s].len()).map(move |c| (v, c)))
            .collect();

        let best = units
            .par_iter()
            .map_init(
                || vec![0.0; n],
                |l, &(v, c)| {
                    let (s, raw, slope) = slopes[v];
                    let location = self.thresholds[s][c];
                    let x = &self.columns[s];
                    for i in 0..n {
                        l[i] = logistic_unchecked(x[i], slope, location);
                    }
                    let mut best: Option<SplitCandidate> = None;
                    for (t, (r, yy)) in splittable.iter().zip(&partial) {
                        let mut m = Moments {
                            yy: *yy,
                            ..Moments::default()
                        };
                        for i in 0..n {
                            let mass = t.mass[i];
                            let wl = mass * l[i];
                            let wr = mass * (1.0 - l[i]);
                            m.ll += wl * wl;
                            m.lr += wl * wr;
                            m.rr += wr * wr;
                            m.ly += wl * r[i];
                            m.ry += wr * r[i];
                        }
                        let Some((bl, br)) = m.solve() else {
                            continue;
                        };
                        let cand = SplitCandidate {
                            node: t.position,
                            variable: s,
                            location,
                            slope,
                            raw_gamma: raw,
                            beta_left: bl,
                            beta_right: br,
                            sse: m.sse(bl, br),
                        };
                        if best.as_ref().is_none_or(|b| cand.rank(b).is_lt()) {
                            best = Some(cand);
                        }
                    }
                    best
                },
            )
            .flatten()
            .min_by(|a, b| a.rank(b));

        let mut best = best.ok_or_else(|| {
            Error::DegenerateData(format!(
                "every split candidate is degenerate ({} terminal nodes)",
                state.terminals.len()
            ))
        })?;
        // report the objective by direct summation rather than from moments
        let t = splittable
            .iter()
            .position(|t| t.position == best.node)
            .expect("winner comes from a splittable terminal");
        let (r, _) = &partial[t];
        let x = &self.columns[best.variable];
        best.sse = (0..n)
            .map(|i| {
                let l = logistic_unchecked(x[i], best.slope, best.location);
                let mass = splittable[t].mass[i];
                (r[i] - best.beta_left * mass * l - best.beta_right * mass * (1.0 - l)).powi(2)
            })
            .sum();
        Ok(best)
    }

    /// Replaces the candidate's terminal node with its two children.
    pub fn apply(&self, state: &mut GrowthState, cand: &SplitCandidate) -> Result<()> {
        let idx = state
            .terminals
            .iter()
            .position(|t| t.position == cand.node)
            .ok_or_else(|| Error::invalid(format!("node {} is not terminal", cand.node)))?;
        let (Some(left), Some(right)) = (left_child(cand.node), right_child(cand.node)) else {
            return Err(Error::invalid("child position overflow"));
        };
        let old = state.terminals.remove(idx);
        let x = &self.columns[cand.variable];
        let n = old.mass.len();
        let mut ml = Vec::with_capacity(n);
        let mut mr = Vec::with_capacity(n);
        for i in 0..n {
            let l = logistic_unchecked(x[i], cand.slope, cand.location);
            let (a, b) = (old.mass[i] * l, old.mass[i] * (1.0 - l));
            state.fitted[i] += cand.beta_left * a + cand.beta_right * b - old.weight * old.mass[i];
            ml.push(a);
            mr.push(b);
        }
        state.parents.push(SplitNode {
            position: cand.node,
            variable: cand.variable,
            location: cand.location,
            slope: cand.slope,
            raw_gamma: cand.raw_gamma,
        });
        state.terminals.push(Terminal {
            position: left,
            weight: cand.beta_left,
            mass: ml,
        });
        state.terminals.push(Terminal {
            position: right,
            weight: cand.beta_right,
            mass: mr,
        });
        state.terminals.sort_by_key(|t| t.position);
        Ok(())
    }

    /// Grows a tree with `config.splits` splits fitted to `targets`.
    pub fn grow(&self, targets: &[f64], rng: &mut Stream) -> Result<GrownTree> {
        self.check_targets(targets)?;
        let mut state = GrowthState::root(targets.len());
        let mut sse_trace = Vec::with_capacity(self.config.splits);
        for _ in 0..self.config.splits {
            let cand = self.search_best_split(&state, targets, rng)?;
            self.apply(&mut state, &cand)?;
            sse_trace.push(state.sse(targets));
        }
        let tree = state.into_tree()?;
        let mut buf = Vec::new();
        let fitted = self
            .data
            .covariates()
            .iter_rows()
            .map(|row| tree.eval_with(row, &mut buf))
            .collect();
        Ok(GrownTree {
            tree,
            fitted,
            sse_trace,
        })
    }
}

/// One-off tree growth; see [`Grower`] to reuse the per-column setup.
pub fn grow_tree(
    data: &Dataset,
    targets: &[f64],
    config: &GrowthConfig,
    rng: &mut Stream,
) -> Result<SmoothTree> {
    Ok(Grower::new(data, config.clone())?.grow(targets, rng)?.tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tree_predict, Matrix};
    use crate::rng::stream;

    fn config(splits: usize, thresholds: ThresholdRule) -> GrowthConfig {
        GrowthConfig {
            splits,
            gamma_range: (0.5, 5.0),
            variable_fraction: 1.0,
            thresholds,
        }
    }

    fn line_data(xs: &[f64], ys: &[f64]) -> Dataset {
        let x = Matrix::new(xs.len(), 1, xs.to_vec()).unwrap();
        Dataset::from_xy(x, ys.to_vec()).unwrap()
    }

    #[test]
    fn leaf_weights_are_group_means_for_indicator_columns() {
        let y = [1.0, 2.0, 3.0, 10.0, 20.0];
        let wl = [1.0, 1.0, 1.0, 0.0, 0.0];
        let wr = [0.0, 0.0, 0.0, 1.0, 1.0];
        let s = solve_leaf_weights(&wl, &wr, &[0.0; 5], &y).unwrap().unwrap();
        assert!((s.beta_left - 2.0).abs() < 1e-9);
        assert!((s.beta_right - 15.0).abs() < 1e-9);
        assert!((s.sse - (2.0 + 50.0)).abs() < 1e-8);
    }

    #[test]
    fn exact_offset_gives_zero_weights() {
        let y = [0.3, -1.0, 2.0];
        let s = solve_leaf_weights(&[0.2, 0.5, 0.9], &[0.8, 0.5, 0.1], &y, &y)
            .unwrap()
            .unwrap();
        assert!(s.beta_left.abs() < 1e-9 && s.beta_right.abs() < 1e-9);
        assert_eq!(s.sse, 0.0);
    }

    #[test]
    fn zero_columns_are_degenerate() {
        let z = [0.0; 4];
        assert!(solve_leaf_weights(&z, &z, &z, &[1.0, 2.0, 3.0, 4.0])
            .unwrap()
            .is_none());
        assert!(solve_leaf_weights(&z, &z[..3], &z, &z).is_err());
    }

    #[test]
    fn degenerate_gamma_interval() {
        let mut rng = stream(1, 0);
        assert_eq!(draw_slope(&mut rng, (2.0, 2.0), 4.0), (2.0, 0.5));
    }

    #[test]
    fn gamma_draws_cover_interval() {
        let mut rng = stream(42, 0);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| draw_slope(&mut rng, (0.5, 5.0), 1.0).0)
            .collect();
        let min = draws.iter().copied().fold(f64::INFINITY, f64::min);
        let max = draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(min >= 0.5 && max <= 5.0);
        assert!((mean - 2.75).abs() < 0.02, "{mean}");
        let again: Vec<f64> = {
            let mut rng = stream(42, 0);
            (0..5).map(|_| draw_slope(&mut rng, (0.5, 5.0), 1.0).0).collect()
        };
        assert_eq!(&draws[..5], &again[..]);
    }

    #[test]
    fn quantile_grid_shapes() {
        assert_eq!(threshold_grid(&[3.0, 1.0, 2.0, 1.0], 5), vec![1.0, 2.0, 3.0]);
        let col: Vec<f64> = (0..1000).map(f64::from).collect();
        let g = threshold_grid(&col, 9);
        assert_eq!(g.len(), 9);
        assert!((g[0] - 99.9).abs() < 1e-9 && (g[8] - 899.1).abs() < 1e-9);
        assert_eq!(midpoint_grid(&[0.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5]);
    }

    #[test]
    fn constant_targets_fit_exactly() {
        let xs: Vec<f64> = (0..20).map(|i| f64::from(i) * 0.1).collect();
        let d = line_data(&xs, &[3.0; 20]);
        let mut rng = stream(0, 0);
        let t = grow_tree(&d, &[3.0; 20], &config(1, ThresholdRule::Quantiles(10)), &mut rng)
            .unwrap();
        for l in t.leaves() {
            assert!((l.weight - 3.0).abs() < 1e-8);
        }
        for x in [-5.0, 0.5, 9.0] {
            assert!((tree_predict(&t, &[x]).unwrap() - 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn two_point_hard_split() {
        let d = line_data(&[0.0, 10.0], &[0.0, 1.0]);
        let cfg = GrowthConfig {
            gamma_range: (1e6, 1e6),
            ..config(1, ThresholdRule::Explicit(vec![vec![-5.0, 5.0, 15.0]]))
        };
        let grower = Grower::new(&d, cfg).unwrap();
        let mut rng = stream(0, 0);
        let cand = grower
            .search_best_split(&GrowthState::root(2), &[0.0, 1.0], &mut rng)
            .unwrap();
        // brute force over the three locations: only c = 5 separates the points
        assert_eq!(cand.location, 5.0);
        // child 2j+1 takes the side above the location
        assert!((cand.beta_left - 1.0).abs() < 1e-9);
        assert!(cand.beta_right.abs() < 1e-9);
        assert!(cand.sse < 1e-15);
    }

    #[test]
    fn exhaustive_oracle_over_three_locations() {
        let xs = [0.1, 0.4, 0.5, 0.9, 1.3, 1.7, 2.2, 2.6];
        let ys = [1.0, 0.7, 1.4, 2.2, 2.0, 3.1, 2.9, 3.6];
        let d = line_data(&xs, &ys);
        let locs = vec![0.45, 1.1, 2.0];
        let cfg = GrowthConfig {
            gamma_range: (1.5, 1.5),
            ..config(1, ThresholdRule::Explicit(vec![locs.clone()]))
        };
        let grower = Grower::new(&d, cfg).unwrap();
        let sd = d.column_sd()[0];
        let slope = 1.5 / sd;
        let oracle: Vec<f64> = locs
            .iter()
            .map(|&c| {
                let wl: Vec<f64> = xs
                    .iter()
                    .map(|&x| 1.0 / (1.0 + (-slope * (x - c)).exp()))
                    .collect();
                let wr: Vec<f64> = wl.iter().map(|l| 1.0 - l).collect();
                solve_leaf_weights(&wl, &wr, &[0.0; 8], &ys).unwrap().unwrap().sse
            })
            .collect();
        let best = (0..3).min_by(|&a, &b| oracle[a].total_cmp(&oracle[b])).unwrap();
        let mut rng = stream(9, 0);
        let cand = grower
            .search_best_split(&GrowthState::root(8), &ys, &mut rng)
            .unwrap();
        assert_eq!(cand.location, locs[best]);
        assert!((cand.sse - oracle[best]).abs() <= 1e-10 * oracle[best].max(1.0));
    }

    #[test]
    fn step_data_is_representable() {
        let xs: Vec<f64> = (-10..10).map(|i| f64::from(i) + 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f64::from(u8::from(x > 0.0))).collect();
        let d = line_data(&xs, &ys);
        let cfg = GrowthConfig {
            gamma_range: (1e6, 1e6),
            ..config(1, ThresholdRule::Midpoints)
        };
        let grower = Grower::new(&d, cfg).unwrap();
        let cand = grower
            .search_best_split(&GrowthState::root(xs.len()), &ys, &mut stream(0, 0))
            .unwrap();
        assert!(cand.sse < 1e-12);
        assert_eq!(cand.location, 0.0);
    }

    #[test]
    fn growth_is_deterministic_and_structurally_valid() {
        let mut rng = stream(5, 1);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0].sin() + r[1] * r[2]).collect();
        let d = Dataset::from_xy(Matrix::from_rows(&rows).unwrap(), y.clone()).unwrap();
        let cfg = GrowthConfig {
            variable_fraction: 2.0 / 3.0,
            ..config(4, ThresholdRule::Quantiles(15))
        };
        let grower = Grower::new(&d, cfg).unwrap();
        let a = grower.grow(&y, &mut stream(11, 2)).unwrap();
        let b = grower.grow(&y, &mut stream(11, 2)).unwrap();
        assert_eq!(a.tree, b.tree);
        assert_eq!(a.tree.parents().len(), 4);
        assert_eq!(a.tree.leaves().len(), 5);
        for w in a.sse_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{w:?}");
        }
        for (row, f) in d.covariates().iter_rows().zip(&a.fitted) {
            assert_eq!(tree_predict(&a.tree, row).unwrap(), *f);
        }
    }

    #[test]
    fn error_paths() {
        let d1 = line_data(&[1.0], &[1.0]);
        let g = Grower::new(&d1, config(1, ThresholdRule::Quantiles(4))).unwrap();
        assert!(matches!(
            g.grow(&[1.0], &mut stream(0, 0)),
            Err(Error::InvalidArgument(_))
        ));
        let flat = line_data(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]);
        let g = Grower::new(&flat, config(1, ThresholdRule::Quantiles(4))).unwrap();
        assert!(matches!(
            g.grow(&[1.0, 2.0, 3.0], &mut stream(0, 0)),
            Err(Error::DegenerateData(_))
        ));
        let d = line_data(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(Grower::new(&d, config(0, ThresholdRule::Midpoints)).is_err());
    }
}
