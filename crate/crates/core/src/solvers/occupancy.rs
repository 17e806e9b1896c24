//! Optimistic projected gradient on the occupancy measure itself.

use nalgebra::DMatrix;

use crate::cmdp::{
    mixed_reward, occupancy_from_policy, policy_from_occupancy, values_of_occupancy, Cmdp, FlowProjector, Multipliers,
    OccupancyMeasure,
};
use crate::error::{parameter, Result};
use crate::minmax::{spectral_norm, BregmanGeometry, Domain};
use crate::solvers::config::SolverConfig;
use crate::solvers::trace::{CmdpTrace, TraceBuilder};

/// Tolerance handed to the projection onto `K` at every step.
pub const PROJECTION_TOL: f64 = 1e-13;
const STEP_FRACTION: f64 = 0.4;

/// Lipschitz estimate of `(d, μ) ↦ (r_μ, θ − R d)`: the spectral norm of the
/// stacked constraint rewards `R`, or 1 when there are no constraints.
pub fn occupancy_lipschitz(cmdp: &Cmdp) -> f64 {
    let n = cmdp.n_constraints();
    if n == 0 {
        return 1.0;
    }
    let r = DMatrix::from_fn(n, cmdp.n_pairs(), |i, j| cmdp.constraints()[i].reward[j]);
    let l = spectral_norm(&r);
    if l > 0.0 {
        l
    } else {
        1.0
    }
}

pub fn default_occupancy_eta(cmdp: &Cmdp) -> f64 {
    STEP_FRACTION / occupancy_lipschitz(cmdp)
}

/// `d^{k+1} = Π_K(d^k − η(2r_μ^k − r_μ^{k−1}))`,
/// `μ^{k+1} = clip(μ^k + η(2v^k − v^{k−1} − θ), 0, cap)`.
pub fn reload_occupancy(cmdp: &Cmdp, config: &SolverConfig) -> Result<CmdpTrace> {
    config.validate()?;
    let eta = config.occupancy_eta.unwrap_or_else(|| default_occupancy_eta(cmdp));
    let k_max = config.iterations;
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let projector = FlowProjector::new(cmdp)?;
    let mut d = match &config.occupancy_init {
        Some(z) => {
            if z.len() != cmdp.n_pairs() {
                return Err(parameter("occupancy_init must have S·A entries"));
            }
            OccupancyMeasure::new(ns, na, z.clone())?
        }
        None => occupancy_from_policy(cmdp, &config.initial_policy(cmdp)?)?,
    };
    let mut mu = config.initial_mu(cmdp)?;
    let cap = config.cap();
    let mu_geom = BregmanGeometry::euclidean(if cap.is_finite() {
        Domain::Box { lo: 0.0, hi: cap }
    } else {
        Domain::NonnegativeOrthant
    });
    let thetas = cmdp.thresholds();
    let mut builder = TraceBuilder::new("reload-occ", cmdp, config.stride, k_max);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for k in 0..=k_max {
        let values = values_of_occupancy(cmdp, d.values());
        builder.push(k, &policy_from_occupancy(&d), &d, &mu, &values);
        if k == k_max {
            break;
        }
        let grad_d = mixed_reward(cmdp, &Multipliers(mu.clone()))?;
        let grad_mu: Vec<f64> = values[1..].iter().zip(&thetas).map(|(v, t)| t - v).collect();
        let (hint_d, hint_mu) = prev.clone().unwrap_or_else(|| (grad_d.clone(), grad_mu.clone()));
        let step: Vec<f64> = grad_d
            .iter()
            .zip(&hint_d)
            .map(|(g, h)| eta * (2.0 * g - h))
            .collect();
        let z: Vec<f64> = d.values().iter().zip(&step).map(|(x, s)| x - s).collect();
        let next_d = projector.project(&z, PROJECTION_TOL)?;
        if !mu.is_empty() {
            mu = mu_geom.omd_step(&mu, &grad_mu, &hint_mu, eta, eta)?;
        }
        d = next_d;
        prev = Some((grad_d, grad_mu));
    }
    Ok(builder.finish())
}
