//! Scalar summaries of constrained performance.

use crate::cmdp::Multipliers;
use crate::error::{parameter, Result};
use crate::solvers::CmdpTrace;

fn overshoot(v: f64, theta: f64) -> f64 {
    (v - theta).max(0.0)
}

/// `v₀ − Σₙ μ̂ₙ·max{vₙ − θₙ, 0}`.
pub fn weighted_reward(v0: f64, constraint_values: &[f64], thetas: &[f64], mu_hat: &[f64]) -> Result<f64> {
    if constraint_values.len() != thetas.len() || mu_hat.len() != thetas.len() {
        return Err(parameter("values, thresholds and weights must have one entry per constraint"));
    }
    if mu_hat.iter().any(|m| !(*m >= 0.0)) {
        return Err(parameter("weights must be nonnegative"));
    }
    Ok(v0
        - constraint_values
            .iter()
            .zip(thetas)
            .zip(mu_hat)
            .map(|((v, t), m)| m * overshoot(*v, *t))
            .sum::<f64>())
}

/// `v₀ − Σₙ max{vₙ − θₙ, 0}`.
pub fn penalized_reward(v0: f64, constraint_values: &[f64], thetas: &[f64]) -> Result<f64> {
    if constraint_values.len() != thetas.len() {
        return Err(parameter("values and thresholds must have one entry per constraint"));
    }
    Ok(v0 - constraint_values.iter().zip(thetas).map(|(v, t)| overshoot(*v, *t)).sum::<f64>())
}

/// Weight `σ(μ)/(1 − σ(μ))` used when multipliers are sigmoid-bounded; this
/// is exactly `e^μ`.
pub fn sigmoid_weight(mu: f64) -> f64 {
    mu.exp()
}

/// Mean over traces of each run's time-averaged multipliers `μ̄^K`.
///
/// The baseline's last iterate oscillates, so the final `μ^K` alone depends
/// on where each run stops in its cycle; the averages converge.
pub fn estimate_mu_star_empirical(traces: &[CmdpTrace]) -> Result<Multipliers> {
    let first = traces.first().ok_or_else(|| parameter("need at least one trace"))?;
    let n = first.mean_mu.len();
    if traces.iter().any(|t| t.mean_mu.len() != n) {
        return Err(parameter("traces disagree on the number of constraints"));
    }
    let mut mean = vec![0.0; n];
    for t in traces {
        for (m, x) in mean.iter_mut().zip(&t.mean_mu) {
            *m += x / traces.len() as f64;
        }
    }
    Ok(Multipliers(mean))
}
