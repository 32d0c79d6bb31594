//! Synthetic regression problems with known signal and derivative.
//!
//! * `cosine`: `x1 ~ N(0,1)`, `x2 ~ Bernoulli(0.5)`, `f = cos(π(x1 + x2))`.
//! * `cubic`: `x1 ~ N(0,1)`, `f = x1³`. A second covariate `x2 ~ N(0,1)` is
//!   pure noise; it keeps the variable-subsampling path busy and plays no part
//!   in the signal.
//!
//! The noise level is set from the realized sample variance of `f`, so the
//! in-sample signal share of variance matches the requested R².

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{Dataset, Matrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dgp {
    Cosine,
    Cubic,
}

impl Dgp {
    /// True regression function at `x = (x1, x2)`.
    pub fn signal(self, x: &[f64]) -> f64 {
        match self {
            Dgp::Cosine => (PI * (x[0] + x[1])).cos(),
            Dgp::Cubic => x[0].powi(3),
        }
    }

    /// `∂f/∂x1` at `x`.
    pub fn partial_x1(self, x: &[f64]) -> f64 {
        match self {
            Dgp::Cosine => -PI * (PI * (x[0] + x[1])).sin(),
            Dgp::Cubic => 3.0 * x[0] * x[0],
        }
    }
}

impl FromStr for Dgp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Dgp::Cosine),
            "cubic" => Ok(Dgp::Cubic),
            other => Err(Error::invalid(format!(
                "unknown dgp '{other}' (expected cosine or cubic)"
            ))),
        }
    }
}

impl fmt::Display for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dgp::Cosine => "cosine",
            Dgp::Cubic => "cubic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub dgp: Dgp,
    pub n: usize,
    pub target_r2: f64,
    pub seed: u64,
}

impl SimSpec {
    pub fn new(dgp: Dgp, n: usize, target_r2: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("simulation needs at least two rows"));
        }
        if !(target_r2 > 0.0 && target_r2 < 1.0) {
            return Err(Error::invalid(format!(
                "target R² must lie in (0,1), got {target_r2}"
            )));
        }
        Ok(Self {
            dgp,
            n,
            target_r2,
            seed,
        })
    }
}

/// A generated dataset with its noiseless signal and true derivative.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub data: Dataset,
    pub truth: Vec<f64>,
    pub true_partial: Vec<f64>,
    pub sigma: f64,
}

/// Noise standard deviation giving `var(f) / (var(f) + σ²) = target_r2`.
pub fn calibrate_sigma(signal_variance: f64, target_r2: f64) -> Result<f64> {
    if !(target_r2 > 0.0 && target_r2 < 1.0) {
        return Err(Error::invalid(format!(
            "target R² must lie in (0,1), got {target_r2}"
        )));
    }
    if !(signal_variance > 0.0 && signal_variance.is_finite()) {
        return Err(Error::invalid("signal variance must be positive"));
    }
    Ok((signal_variance * (1.0 - target_r2) / target_r2).sqrt())
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

pub fn generate(spec: &SimSpec) -> Result<Simulation> {
    let mut rng = rng::stream(spec.seed, 0);
    let coin = Bernoulli::new(0.5).expect("valid probability");
    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let x1: f64 = StandardNormal.sample(&mut rng);
        let x2 = match spec.dgp {
            Dgp::Cosine => f64::from(u8::from(coin.sample(&mut rng))),
            Dgp::Cubic => StandardNormal.sample(&mut rng),
        };
        rows.push(vec![x1, x2]);
    }
    let truth: Vec<f64> = rows.iter().map(|r| spec.dgp.signal(r)).collect();
    let true_partial = rows.iter().map(|r| spec.dgp.partial_x1(r)).collect();
    let sigma = calibrate_sigma(sample_variance(&truth), spec.target_r2)?;
    let y = truth
        .iter()
        .map(|f| {
            let e: f64 = rng.sample(StandardNormal);
            f + sigma * e
        })
        .collect();
    let data = Dataset::from_xy(Matrix::from_rows(&rows)?, y)?;
    Ok(Simulation {
        data,
        truth,
        true_partial,
        sigma,
    })
}
