use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Root mean squared difference.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "rmse of {} actual values against {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::invalid("rmse of an empty vector"));
    }
    let ss: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum();
    Ok((ss / actual.len() as f64).sqrt())
}

/// `1 - SS_res / SS_tot` of `predicted` as an approximation of `actual`.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    let res = rmse(actual, predicted)?.powi(2) * actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if tot == 0.0 {
        return Err(Error::invalid("R² undefined for a constant reference"));
    }
    Ok(1.0 - res / tot)
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::invalid(
            "correlation needs two equal-length vectors of at least two values",
        ));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::invalid("correlation undefined for a constant vector"));
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Linear-interpolation empirical quantile at probability `p ∈ [0,1]`.
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("quantile needs data and p in [0,1]"));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let h = p * (s.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    Ok(s[lo] + (h - lo as f64) * (s[hi] - s[lo]))
}

/// Two-sided paired t-test p-value for `a` against `b`. Identical vectors
/// give 1; a constant nonzero difference gives 0.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::invalid(
            "paired t-test needs two equal-length samples of at least two values",
        ));
    }
    let k = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / k;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    if var == 0.0 {
        return Ok(if mean == 0.0 { 1.0 } else { 0.0 });
    }
    let t = mean / (var / k).sqrt();
    let dist = StudentsT::new(0.0, 1.0, k - 1.0).expect("positive degrees of freedom");
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}
