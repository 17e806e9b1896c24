//! Policy-space primal-dual solvers built on exact policy evaluation.

use crate::cmdp::{evaluate_all, mixed_q, Cmdp, Evaluation, Policy};
use crate::error::{parameter, Result};
use crate::minmax::{BregmanGeometry, Domain};
use crate::solvers::config::SolverConfig;
use crate::solvers::trace::{CmdpTrace, TraceBuilder};

/// Gradients of the Lagrangian at one policy: `−a = q_μ` for the policy
/// player per state row, and `v_{1:N} − θ` for the multipliers.
struct Gradients {
    q_mu: Vec<f64>,
    violation: Vec<f64>,
}

fn gradients(cmdp: &Cmdp, ev: &Evaluation, mu: &[f64]) -> Result<Gradients> {
    let qn: Vec<&[f64]> = ev.q[1..].iter().map(|q| q.q.as_slice()).collect();
    let q_mu = mixed_q(&ev.q[0].q, &qn, mu)?;
    let violation = ev.values[1..]
        .iter()
        .zip(cmdp.thresholds())
        .map(|(v, t)| v - t)
        .collect();
    Ok(Gradients { q_mu, violation })
}

/// `π' ∝ π·exp(−η(g + (g − g_prev)))` per state, with `g = q_μ`.
fn policy_step(policy: &Policy, g: &[f64], g_prev: &[f64], eta: f64) -> Result<Policy> {
    let geom = BregmanGeometry::entropic_simplex();
    let na = policy.n_actions();
    let mut probs = Vec::with_capacity(g.len());
    for s in 0..policy.n_states() {
        let row = s * na..(s + 1) * na;
        probs.extend(geom.omd_step(policy.row(s), &g[row.clone()], &g_prev[row], eta, eta)?);
    }
    Ok(Policy::from_rows_unchecked(policy.n_states(), na, probs))
}

/// Projected ascent `μ' = clip(μ + η(2g − g_prev), 0, cap)`.
fn mu_step(mu: &[f64], g: &[f64], g_prev: &[f64], eta: f64, cap: f64) -> Result<Vec<f64>> {
    if mu.is_empty() {
        return Ok(Vec::new());
    }
    let domain = if cap.is_finite() {
        Domain::Box { lo: 0.0, hi: cap }
    } else {
        Domain::NonnegativeOrthant
    };
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    BregmanGeometry::euclidean(domain).omd_step(mu, &neg(g), &neg(g_prev), eta, eta)
}

#[derive(Clone, Copy, PartialEq)]
enum Dual {
    Learned,
    Fixed,
}

fn primal_dual_loop(cmdp: &Cmdp, config: &SolverConfig, name: &str, optimism: bool, dual: Dual, mu0: Vec<f64>) -> Result<CmdpTrace> {
    config.validate()?;
    let k_max = config.iterations;
    let cap = config.cap();
    let mut policy = config.initial_policy(cmdp)?;
    let mut mu = mu0;
    let mut eval = evaluate_all(cmdp, &policy)?;
    let mut builder = TraceBuilder::new(name, cmdp, config.stride, k_max);
    // Without a multiplier player there is no game and nothing to be
    // optimistic about.
    let optimistic = optimism && cmdp.n_constraints() > 0 && dual == Dual::Learned;
    let mut prev: Option<Gradients> = None;
    for k in 0..=k_max {
        builder.push(k, &policy, &eval.occupancy, &mu, &eval.values);
        if k == k_max {
            break;
        }
        let cur = gradients(cmdp, &eval, &mu)?;
        let hint = match (&prev, optimistic) {
            (Some(p), true) => p,
            _ => &cur,
        };
        let next_policy = policy_step(&policy, &cur.q_mu, &hint.q_mu, config.eta_pi)?;
        if dual == Dual::Learned {
            mu = mu_step(&mu, &cur.violation, &hint.violation, config.eta_mu, cap)?;
        }
        policy = next_policy;
        eval = evaluate_all(cmdp, &policy)?;
        prev = Some(cur);
    }
    Ok(builder.finish())
}

/// Optimistic mirror-descent policy iteration with optimistic projected
/// multiplier ascent. Setting `config.optimism = false` gives the plain
/// primal-dual iteration.
pub fn reload_mdpi(cmdp: &Cmdp, config: &SolverConfig) -> Result<CmdpTrace> {
    let name = if config.optimism { "reload-mdpi" } else { "mu-mdpi" };
    primal_dual_loop(cmdp, config, name, config.optimism, Dual::Learned, config.initial_mu(cmdp)?)
}

/// The non-optimistic primal-dual baseline; ignores `config.optimism`.
pub fn mu_mdpi(cmdp: &Cmdp, config: &SolverConfig) -> Result<CmdpTrace> {
    primal_dual_loop(cmdp, config, "mu-mdpi", false, Dual::Learned, config.initial_mu(cmdp)?)
}

/// Mirror-descent policy iteration on the scalarized reward
/// `r₀ − Σₙ μ*ₙ rₙ` with the multipliers held fixed.
pub fn fixed_mu_solver(cmdp: &Cmdp, mu_star: &[f64], config: &SolverConfig) -> Result<CmdpTrace> {
    if mu_star.len() != cmdp.n_constraints() || mu_star.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(parameter("fixed multipliers must be N nonnegative numbers"));
    }
    primal_dual_loop(cmdp, config, "fixed-mu", false, Dual::Fixed, mu_star.to_vec())
}

/// Past-extragradient policy iteration: a half-step from `(π^k, μ^k)` driven
/// by the previous half-step's gradients, one evaluation at the half-step,
/// then the full step from `(π^k, μ^k)` driven by the half-step gradients.
pub fn peg_mdpi(cmdp: &Cmdp, config: &SolverConfig) -> Result<CmdpTrace> {
    config.validate()?;
    let k_max = config.iterations;
    let cap = config.cap();
    let eta = config.eta_pi;
    let mut policy = config.initial_policy(cmdp)?;
    let mut mu = config.initial_mu(cmdp)?;
    let mut eval = evaluate_all(cmdp, &policy)?;
    let mut builder = TraceBuilder::new("peg-mdpi", cmdp, config.stride, k_max);
    // Gradients at the previous half-step; the initial point stands in at k = 0.
    let mut half_grad = gradients(cmdp, &eval, &mu)?;
    for k in 0..=k_max {
        builder.push(k, &policy, &eval.occupancy, &mu, &eval.values);
        if k == k_max {
            break;
        }
        let half_policy = policy_step(&policy, &half_grad.q_mu, &half_grad.q_mu, eta)?;
        let half_mu = mu_step(&mu, &half_grad.violation, &half_grad.violation, config.eta_mu, cap)?;
        let half_eval = evaluate_all(cmdp, &half_policy)?;
        half_grad = gradients(cmdp, &half_eval, &half_mu)?;
        policy = policy_step(&policy, &half_grad.q_mu, &half_grad.q_mu, eta)?;
        mu = mu_step(&mu, &half_grad.violation, &half_grad.violation, config.eta_mu, cap)?;
        eval = evaluate_all(cmdp, &policy)?;
    }
    Ok(builder.finish())
}
