use crate::error::{Error, Result};

pub const DEFAULT_GAMMA_RANGE: (f64, f64) = (0.5, 5.0);

/// Boosting hyperparameters. All ranges are checked when a value is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameters {
    num_trees: usize,
    splits_per_tree: usize,
    gamma_range: (f64, f64),
    shrinkage: f64,
    variable_fraction: f64,
    threshold_grid: usize,
    seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            num_trees: 1000,
            splits_per_tree: 4,
            gamma_range: DEFAULT_GAMMA_RANGE,
            shrinkage: 0.2,
            variable_fraction: 2.0 / 3.0,
            threshold_grid: 100,
            seed: 0,
        }
    }
}

impl Hyperparameters {
    pub fn with_num_trees(mut self, num_trees: usize) -> Result<Self> {
        if num_trees == 0 {
            return Err(Error::invalid("trees must be a positive integer"));
        }
        self.num_trees = num_trees;
        Ok(self)
    }

    pub fn with_splits_per_tree(mut self, splits: usize) -> Result<Self> {
        if splits == 0 {
            return Err(Error::invalid("splits must be a positive integer"));
        }
        self.splits_per_tree = splits;
        Ok(self)
    }

    pub fn with_gamma_range(mut self, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min <= max) {
            return Err(Error::invalid(format!(
                "gamma range must satisfy 0 < gamma_min ≤ gamma_max, got [{min}, {max}]"
            )));
        }
        self.gamma_range = (min, max);
        Ok(self)
    }

    pub fn with_shrinkage(mut self, shrinkage: f64) -> Result<Self> {
        if !(shrinkage > 0.0 && shrinkage <= 1.0) {
            return Err(Error::invalid(format!(
                "shrinkage ∈ (0,1], got {shrinkage}"
            )));
        }
        self.shrinkage = shrinkage;
        Ok(self)
    }

    pub fn with_variable_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "variable fraction ∈ (0,1], got {fraction}"
            )));
        }
        self.variable_fraction = fraction;
        Ok(self)
    }

    pub fn with_threshold_grid(mut self, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::invalid("threshold grid must be a positive integer"));
        }
        self.threshold_grid = grid;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn num_trees(&self) -> usize {
        self.num_trees
    }

    pub fn splits_per_tree(&self) -> usize {
        self.splits_per_tree
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        self.gamma_range
    }

    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    pub fn variable_fraction(&self) -> f64 {
        self.variable_fraction
    }

    pub fn threshold_grid(&self) -> usize {
        self.threshold_grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = Hyperparameters::default();
        assert_eq!(p.num_trees(), 1000);
        assert_eq!(p.splits_per_tree(), 4);
        assert_eq!(p.gamma_range(), (0.5, 5.0));
        assert_eq!(p.shrinkage(), 0.2);
        assert_eq!(p.threshold_grid(), 100);
        assert!((p.variable_fraction() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ranges_enforced() {
        let p = Hyperparameters::default;
        assert!(p().with_shrinkage(0.0).is_err());
        assert!(p().with_shrinkage(1.5).is_err());
        assert!(p().with_shrinkage(1.0).is_ok());
        assert!(p().with_num_trees(0).is_err());
        assert!(p().with_splits_per_tree(0).is_err());
        assert!(p().with_gamma_range(0.0, 1.0).is_err());
        assert!(p().with_gamma_range(2.0, 1.0).is_err());
        assert!(p().with_gamma_range(2.0, 2.0).is_ok());
        assert!(p().with_variable_fraction(0.0).is_err());
        assert!(p().with_variable_fraction(f64::NAN).is_err());
        assert!(p().with_threshold_grid(0).is_err());
        let msg = p().with_shrinkage(0.0).unwrap_err().to_string();
        assert!(msg.contains("shrinkage ∈ (0,1]"), "{msg}");
    }
}
