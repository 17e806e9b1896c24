//! Last-iterate and average-iterate convergence diagnostics.

use serde::{Deserialize, Serialize};

use crate::cmdp::Cmdp;
use crate::error::{parameter, precondition, Result};
use crate::oracle::SaddlePoint;
use crate::solvers::CmdpTrace;

/// The saddle in `(v₀, v_{1:N}, μ)` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleTarget {
    pub values: Vec<f64>,
    pub mu: Vec<f64>,
}

impl SaddleTarget {
    pub fn from_saddle(saddle: &SaddlePoint, cmdp: &Cmdp) -> Self {
        Self {
            values: saddle.values(cmdp),
            mu: saddle.mu_star.0.clone(),
        }
    }

    pub fn distance(&self, values: &[f64], mu: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(values)
            .chain(self.mu.iter().zip(mu))
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Per-record Euclidean distance to the saddle in value/multiplier space.
pub fn distance_to_saddle(trace: &CmdpTrace, target: &SaddleTarget) -> Result<Vec<f64>> {
    check_dims(trace, target)?;
    Ok(trace.records.iter().map(|r| target.distance(&r.values, &r.mu)).collect())
}

/// Distance of the running-mean iterate at each record.
pub fn averaged_distance_to_saddle(trace: &CmdpTrace, target: &SaddleTarget) -> Result<Vec<f64>> {
    check_dims(trace, target)?;
    Ok(trace
        .records
        .iter()
        .map(|r| target.distance(&r.mean_values, &r.mean_mu))
        .collect())
}

fn check_dims(trace: &CmdpTrace, target: &SaddleTarget) -> Result<()> {
    let r = trace.records.first().ok_or_else(|| precondition("empty trace"))?;
    if r.values.len() != target.values.len() || r.mu.len() != target.mu.len() {
        return Err(parameter("saddle and trace have different constraint counts"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LicVerdict {
    Converged { limit: f64 },
    Oscillating { amplitude: f64 },
}

impl LicVerdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, LicVerdict::Converged { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            LicVerdict::Converged { .. } => "converged",
            LicVerdict::Oscillating { .. } => "oscillating",
        }
    }
}

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.1;
pub const TOY_TOL: f64 = 1e-3;
pub const CATCH_TOL: f64 = 1e-2;

fn window(series: &[f64], window_fraction: f64) -> Result<&[f64]> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(parameter(format!("window fraction {window_fraction} outside (0, 1]")));
    }
    let needed = (10.0 / window_fraction).ceil() as usize;
    if series.len() < needed {
        return Err(precondition(format!(
            "series of length {} is shorter than the {needed} points the window needs",
            series.len()
        )));
    }
    let w = ((series.len() as f64 * window_fraction).ceil() as usize).max(1);
    Ok(&series[series.len() - w..])
}

/// `max − min` over the final `fraction` of `series`.
pub fn tail_amplitude(series: &[f64], fraction: f64) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let w = ((series.len() as f64 * fraction).ceil() as usize).clamp(1, series.len());
    let tail = &series[series.len() - w..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    hi - lo
}

/// Converged iff the final window's amplitude and the final value are both
/// within `tol`. Meant for distance-to-saddle series.
///
/// A series that settles away from zero also comes out `Oscillating`, with a
/// tiny amplitude. That happens when the saddle is not unique and the
/// iterates approach a different one from the oracle's.
pub fn lic_diagnostic(series: &[f64], window_fraction: f64, tol: f64) -> Result<LicVerdict> {
    let w = window(series, window_fraction)?;
    let amplitude = tail_amplitude(w, 1.0);
    let last = *w.last().expect("window is nonempty");
    if amplitude <= tol && last.abs() <= tol {
        Ok(LicVerdict::Converged { limit: last })
    } else {
        Ok(LicVerdict::Oscillating { amplitude })
    }
}

/// Like [`lic_diagnostic`] but judges only the window amplitude, for value
/// series with no known limit.
pub fn settling_diagnostic(series: &[f64], window_fraction: f64, tol: f64) -> Result<LicVerdict> {
    let w = window(series, window_fraction)?;
    let amplitude = tail_amplitude(w, 1.0);
    if amplitude <= tol {
        Ok(LicVerdict::Converged {
            limit: *w.last().expect("window is nonempty"),
        })
    } else {
        Ok(LicVerdict::Oscillating { amplitude })
    }
}

/// Sample mean and standard error `s/√n`.
pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
