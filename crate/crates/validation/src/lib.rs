//! Oracles and reporting for the acceptance suite in `tests/acceptance.rs`.

use stboost::Matrix;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    pub fn line(&self, id: usize, name: &str, seconds: f64) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("[{tag}] criterion {id:>2} {name}: {} ({seconds:.1} s)", self.detail)
    }
}

/// Lowest two-group SSE of `y` over every column of `x` and every cut
/// between distinct sorted values, found by brute force. Returns `None` when
/// no column has two distinct values.
pub fn cart_best_sse(x: &Matrix, y: &[f64]) -> Option<f64> {
    let sse = |part: &[usize]| {
        let mean = part.iter().map(|&i| y[i]).sum::<f64>() / part.len() as f64;
        part.iter().map(|&i| (y[i] - mean).powi(2)).sum::<f64>()
    };
    let mut best: Option<f64> = None;
    for j in 0..x.cols() {
        let mut idx: Vec<usize> = (0..y.len()).collect();
        idx.sort_by(|&a, &b| x.get(a, j).total_cmp(&x.get(b, j)));
        for cut in 1..idx.len() {
            if x.get(idx[cut - 1], j) == x.get(idx[cut], j) {
                continue;
            }
            let s = sse(&idx[..cut]) + sse(&idx[cut..]);
            best = Some(best.map_or(s, |b| b.min(s)));
        }
    }
    best
}
