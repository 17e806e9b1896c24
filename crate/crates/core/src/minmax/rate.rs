//! Log-linear rate fits for geometrically converging sequences.

use crate::error::{precondition, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Contraction factor: `d_k ≈ C·α^{-k}`.
    pub alpha: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `log d_k = a − k·log α` over the tail half of
/// `distances`.
pub fn fit_linear_rate(distances: &[f64]) -> Result<RateFit> {
    if distances.len() < 10 {
        return Err(precondition(format!(
            "need at least 10 distances, got {}",
            distances.len()
        )));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(precondition(format!("distances must be positive, got {d}")));
    }
    let start = distances.len() / 2;
    let pts: Vec<(f64, f64)> = distances[start..]
        .iter()
        .enumerate()
        .map(|(i, d)| ((start + i) as f64, d.ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_k = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_k).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_k) * (p.1 - mean_l)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_l).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_l - slope * mean_k;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    // a flat series is fit exactly by a zero slope
    let r_squared = if syy <= f64::EPSILON * n { 1.0 } else { 1.0 - ss_res / syy };
    Ok(RateFit {
        alpha: (-slope).exp(),
        r_squared,
    })
}
