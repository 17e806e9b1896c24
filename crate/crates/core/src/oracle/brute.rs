//! Exhaustive policy-grid search for tiny CMDPs, independent of the LP.

use crate::cmdp::{Cmdp, Multipliers, OccupancyMeasure, Policy, PolicyEvaluator};
use crate::error::{parameter, Result};
use crate::oracle::saddle::{SaddlePoint, SaddleStatus};

pub const MAX_PAIRS: usize = 6;
pub const MAX_CONSTRAINTS: usize = 2;
/// Bound on the number of grid policies evaluated.
pub const MAX_GRID_POINTS: usize = 20_000_000;

/// Compositions of `resolution` into `parts` nonnegative integers.
fn compositions(resolution: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![resolution]];
    }
    let mut out = Vec::new();
    for first in 0..=resolution {
        for mut rest in compositions(resolution - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Grid search over policies with probabilities in multiples of
/// `1/resolution`. The primal value is the best feasible grid value; `μ*` is
/// the minimizer of the grid dual function `g(μ) = max_π L̃(π, μ)`.
pub fn brute_force_verify(cmdp: &Cmdp, resolution: usize) -> Result<SaddlePoint> {
    let (ns, na, nc) = (cmdp.n_states(), cmdp.n_actions(), cmdp.n_constraints());
    if ns * na > MAX_PAIRS {
        return Err(parameter(format!("brute force needs S·A ≤ {MAX_PAIRS}, got {}", ns * na)));
    }
    if nc > MAX_CONSTRAINTS {
        return Err(parameter(format!("brute force handles at most {MAX_CONSTRAINTS} constraints")));
    }
    if resolution == 0 {
        return Err(parameter("resolution must be positive"));
    }
    let per_state = binomial(resolution + na - 1, na - 1);
    if per_state.powi(ns as i32) > MAX_GRID_POINTS as f64 {
        return Err(parameter(format!(
            "grid of {:.3e} policies exceeds the limit of {MAX_GRID_POINTS}",
            per_state.powi(ns as i32)
        )));
    }
    let rows = compositions(resolution, na);
    let thetas = cmdp.thresholds();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut index = vec![0usize; ns];
    let scale = resolution as f64;
    loop {
        let probs: Vec<f64> = index
            .iter()
            .flat_map(|&i| rows[i].iter().map(|&k| k as f64 / scale))
            .collect();
        let policy = Policy::new(ns, na, probs)?;
        let ev = PolicyEvaluator::new(cmdp, &policy)?;
        let d = ev.occupancy();
        let v = crate::cmdp::values_of_occupancy(cmdp, d.values());
        let feasible = v[1..].iter().zip(&thetas).all(|(x, t)| *x <= t + 1e-12);
        if feasible && best.as_ref().map_or(true, |(b, _)| v[0] > *b) {
            best = Some((v[0], d.into_values()));
        }
        values.push(v);
        // Odometer increment over per-state grid rows.
        let mut s = 0;
        loop {
            if s == ns {
                break;
            }
            index[s] += 1;
            if index[s] < rows.len() {
                break;
            }
            index[s] = 0;
            s += 1;
        }
        if s == ns {
            break;
        }
    }
    let Some((primal, d_best)) = best else {
        return Ok(SaddlePoint {
            d_star: OccupancyMeasure::new(ns, na, vec![0.0; ns * na])?,
            mu_star: Multipliers::zeros(nc),
            primal_value: f64::NAN,
            dual_value: f64::NAN,
            status: SaddleStatus::Infeasible,
            degenerate: false,
            max_reduced_cost: f64::NAN,
        });
    };
    let dual = |mu: &[f64]| -> f64 {
        values
            .iter()
            .map(|v| v[0] - mu.iter().zip(&v[1..]).zip(&thetas).map(|((m, x), t)| m * (x - t)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (mu, dual_value) = minimize_dual(nc, &dual);
    Ok(SaddlePoint {
        d_star: OccupancyMeasure::new(ns, na, d_best)?,
        mu_star: Multipliers(mu),
        primal_value: primal,
        dual_value,
        status: SaddleStatus::Optimal,
        degenerate: false,
        max_reduced_cost: f64::NAN,
    })
}

const MU_UPPER: f64 = 1e3;
const SECTION_STEPS: usize = 120;

/// Golden-section search on one coordinate of a convex function.
fn golden(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..SECTION_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

fn minimize_dual(nc: usize, g: &dyn Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    match nc {
        0 => (vec![], g(&[])),
        1 => {
            let (m, v) = golden(&|m| g(&[m]), 0.0, MU_UPPER);
            (vec![m], v)
        }
        _ => {
            let inner = |m1: f64| golden(&|m2| g(&[m1, m2]), 0.0, MU_UPPER);
            let (m1, v) = golden(&|m1| inner(m1).1, 0.0, MU_UPPER);
            (vec![m1, inner(m1).0], v)
        }
    }
}
