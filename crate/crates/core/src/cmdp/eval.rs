//! Exact policy evaluation, occupancy measures and the Lagrangian.

use crate::cmdp::model::{Cmdp, Multipliers, OccupancyMeasure, Policy, QValues};
use crate::error::{parameter, Error, Result};
use crate::linalg::LuFactors;

/// Below this state mass a row of `d` carries no policy information.
const ZERO_MASS: f64 = 1e-12;

/// `P_π(s, s') = Σ_a π(a|s) P(s'|s, a)`, row-major `S×S`.
pub fn policy_transition(cmdp: &Cmdp, policy: &Policy) -> Vec<f64> {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let mut p = vec![0.0; ns * ns];
    for s in 0..ns {
        let row = &mut p[s * ns..(s + 1) * ns];
        for a in 0..na {
            let w = policy.prob(s, a);
            if w != 0.0 {
                for (dst, t) in row.iter_mut().zip(cmdp.transition(s, a)) {
                    *dst += w * t;
                }
            }
        }
    }
    p
}

fn check_shapes(cmdp: &Cmdp, policy: &Policy) -> Result<()> {
    if policy.n_states() != cmdp.n_states() || policy.n_actions() != cmdp.n_actions() {
        return Err(parameter(format!(
            "policy is {}×{} but the cmdp is {}×{}",
            policy.n_states(),
            policy.n_actions(),
            cmdp.n_states(),
            cmdp.n_actions()
        )));
    }
    Ok(())
}

/// One factorization of `I − γP_π` serving both the value solve and the
/// (transposed) occupancy solve.
pub struct PolicyEvaluator<'a> {
    cmdp: &'a Cmdp,
    policy: &'a Policy,
    lu: LuFactors,
}

impl<'a> PolicyEvaluator<'a> {
    pub fn new(cmdp: &'a Cmdp, policy: &'a Policy) -> Result<Self> {
        check_shapes(cmdp, policy)?;
        let ns = cmdp.n_states();
        let mut m = policy_transition(cmdp, policy);
        for (i, x) in m.iter_mut().enumerate() {
            *x *= -cmdp.gamma();
            if i / ns == i % ns {
                *x += 1.0;
            }
        }
        let lu = LuFactors::factor(m, ns)
            .map_err(|e| Error::Numerical(format!("policy evaluation system: {e}")))?;
        Ok(Self { cmdp, policy, lu })
    }

    /// Discounted state distribution `d_s = (1−γ)(I − γP_πᵀ)⁻¹ρ`.
    pub fn state_occupancy(&self) -> Vec<f64> {
        let b: Vec<f64> = self.cmdp.rho().iter().map(|r| (1.0 - self.cmdp.gamma()) * r).collect();
        self.lu.solve_transpose(&b)
    }

    pub fn occupancy(&self) -> OccupancyMeasure {
        let na = self.cmdp.n_actions();
        let ds = self.state_occupancy();
        let d = self
            .policy
            .probs()
            .iter()
            .enumerate()
            .map(|(i, p)| ds[i / na] * p)
            .collect();
        OccupancyMeasure::new(self.cmdp.n_states(), na, d).expect("shape matches")
    }

    /// q-values of an arbitrary `S×A` reward under the fixed policy.
    pub fn q_of(&self, reward: &[f64]) -> QValues {
        let (ns, na) = (self.cmdp.n_states(), self.cmdp.n_actions());
        let r_pi: Vec<f64> = (0..ns)
            .map(|s| {
                self.policy
                    .row(s)
                    .iter()
                    .zip(&reward[s * na..(s + 1) * na])
                    .map(|(p, r)| p * r)
                    .sum()
            })
            .collect();
        let v = self.lu.solve(&r_pi);
        let q = q_from_v(self.cmdp, reward, &v);
        QValues { q, v }
    }

    pub fn q(&self, n: usize) -> QValues {
        self.q_of(self.cmdp.reward(n))
    }
}

fn q_from_v(cmdp: &Cmdp, reward: &[f64], v: &[f64]) -> Vec<f64> {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let mut q = reward.to_vec();
    for s in 0..ns {
        for a in 0..na {
            let next: f64 = cmdp.transition(s, a).iter().zip(v).map(|(p, x)| p * x).sum();
            q[s * na + a] += cmdp.gamma() * next;
        }
    }
    q
}

/// All quantities a primal-dual iteration needs from one policy.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub occupancy: OccupancyMeasure,
    /// `q[n]` for `n = 0..=N`.
    pub q: Vec<QValues>,
    /// `vₙ = ⟨rₙ, d_π⟩` for `n = 0..=N`.
    pub values: Vec<f64>,
}

pub fn evaluate_all(cmdp: &Cmdp, policy: &Policy) -> Result<Evaluation> {
    let ev = PolicyEvaluator::new(cmdp, policy)?;
    let occupancy = ev.occupancy();
    let q = (0..=cmdp.n_constraints()).map(|n| ev.q(n)).collect();
    let values = (0..=cmdp.n_constraints())
        .map(|n| dot(cmdp.reward(n), occupancy.values()))
        .collect();
    Ok(Evaluation { occupancy, q, values })
}

pub fn occupancy_from_policy(cmdp: &Cmdp, policy: &Policy) -> Result<OccupancyMeasure> {
    Ok(PolicyEvaluator::new(cmdp, policy)?.occupancy())
}

/// `π(a|s) ∝ d(s,a)`; states carrying no mass get the uniform row.
pub fn policy_from_occupancy(d: &OccupancyMeasure) -> Policy {
    let na = d.n_actions();
    let mut probs = Vec::with_capacity(d.values().len());
    for row in d.values().chunks_exact(na) {
        let clipped: Vec<f64> = row.iter().map(|x| x.max(0.0)).collect();
        let mass: f64 = clipped.iter().sum();
        if mass < ZERO_MASS {
            probs.extend(std::iter::repeat(1.0 / na as f64).take(na));
        } else {
            probs.extend(clipped.iter().map(|x| x / mass));
        }
    }
    Policy::from_rows_unchecked(d.n_states(), na, probs)
}

pub fn policy_eval(cmdp: &Cmdp, policy: &Policy, n: usize) -> Result<QValues> {
    if n > cmdp.n_constraints() {
        return Err(parameter(format!("reward index {n} exceeds {} constraints", cmdp.n_constraints())));
    }
    Ok(PolicyEvaluator::new(cmdp, policy)?.q(n))
}

/// `max |q − (r + γ P v)|` with `v(s) = Σ_a π(a|s) q(s,a)`.
pub fn bellman_residual(cmdp: &Cmdp, policy: &Policy, reward: &[f64], q: &[f64]) -> f64 {
    let na = cmdp.n_actions();
    let v: Vec<f64> = (0..cmdp.n_states())
        .map(|s| policy.row(s).iter().zip(&q[s * na..(s + 1) * na]).map(|(p, x)| p * x).sum())
        .collect();
    q_from_v(cmdp, reward, &v)
        .iter()
        .zip(q)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// `⟨rₙ, d_π⟩`.
pub fn value_of(cmdp: &Cmdp, policy: &Policy, n: usize) -> Result<f64> {
    if n > cmdp.n_constraints() {
        return Err(parameter(format!("reward index {n} exceeds {} constraints", cmdp.n_constraints())));
    }
    let d = occupancy_from_policy(cmdp, policy)?;
    Ok(dot(cmdp.reward(n), d.values()))
}

/// `(1−γ) ρᵀ v`, the same value read off the state-value function.
pub fn normalized_state_value(cmdp: &Cmdp, v: &[f64]) -> f64 {
    (1.0 - cmdp.gamma()) * dot(cmdp.rho(), v)
}

pub fn values_of_occupancy(cmdp: &Cmdp, d: &[f64]) -> Vec<f64> {
    (0..=cmdp.n_constraints()).map(|n| dot(cmdp.reward(n), d)).collect()
}

fn check_mu(cmdp: &Cmdp, mu: &[f64]) -> Result<()> {
    if mu.len() != cmdp.n_constraints() {
        return Err(parameter(format!(
            "{} multipliers for {} constraints",
            mu.len(),
            cmdp.n_constraints()
        )));
    }
    Ok(())
}

/// `r_μ = −r₀ + Σₙ μₙ rₙ`, the gradient of the Lagrangian in `d`.
pub fn mixed_reward(cmdp: &Cmdp, mu: &Multipliers) -> Result<Vec<f64>> {
    check_mu(cmdp, mu.as_slice())?;
    let mut r: Vec<f64> = cmdp.task_reward().iter().map(|x| -x).collect();
    for (c, &m) in cmdp.constraints().iter().zip(mu.as_slice()) {
        for (dst, x) in r.iter_mut().zip(&c.reward) {
            *dst += m * x;
        }
    }
    Ok(r)
}

/// `q_μ = −q₀ + Σₙ μₙ qₙ`.
pub fn mixed_q(q0: &[f64], qn: &[&[f64]], mu: &[f64]) -> Result<Vec<f64>> {
    if qn.len() != mu.len() {
        return Err(parameter(format!("{} q arrays for {} multipliers", qn.len(), mu.len())));
    }
    if let Some(bad) = qn.iter().find(|q| q.len() != q0.len()) {
        return Err(parameter(format!("q array of length {} against {}", bad.len(), q0.len())));
    }
    let mut out: Vec<f64> = q0.iter().map(|x| -x).collect();
    for (q, &m) in qn.iter().zip(mu) {
        for (dst, x) in out.iter_mut().zip(q.iter()) {
            *dst += m * x;
        }
    }
    Ok(out)
}

/// `L(d, μ) = −⟨r₀, d⟩ + Σₙ μₙ(⟨rₙ, d⟩ − θₙ)`.
pub fn lagrangian(cmdp: &Cmdp, d: &[f64], mu: &[f64]) -> Result<f64> {
    check_mu(cmdp, mu)?;
    if d.len() != cmdp.n_pairs() {
        return Err(parameter("occupancy has the wrong shape"));
    }
    Ok(lagrangian_from_values(&values_of_occupancy(cmdp, d), &cmdp.thresholds(), mu))
}

/// The Lagrangian from `v₀..v_N` directly.
pub fn lagrangian_from_values(values: &[f64], thetas: &[f64], mu: &[f64]) -> f64 {
    -values[0]
        + mu
            .iter()
            .zip(&values[1..])
            .zip(thetas)
            .map(|((m, v), t)| m * (v - t))
            .sum::<f64>()
}

/// `∇_d L = r_μ`.
pub fn lagrangian_grad_d(cmdp: &Cmdp, mu: &[f64]) -> Result<Vec<f64>> {
    mixed_reward(cmdp, &Multipliers(mu.to_vec()))
}

/// `∇_μ L = v_{1:N} − θ`.
pub fn lagrangian_grad_mu(cmdp: &Cmdp, d: &[f64]) -> Result<Vec<f64>> {
    if d.len() != cmdp.n_pairs() {
        return Err(parameter("occupancy has the wrong shape"));
    }
    Ok(cmdp
        .constraints()
        .iter()
        .map(|c| dot(&c.reward, d) - c.threshold)
        .collect())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
