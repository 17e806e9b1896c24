use serde::{Deserialize, Serialize};

use crate::cmdp::{Cmdp, Multipliers, Policy};
use crate::envs::SplitMix64;
use crate::error::{parameter, Result};

pub const DEFAULT_MU_CAP: f64 = 100.0;

/// How the first policy is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyInit {
    Uniform,
    /// `(1 − weight)·uniform + weight·Dirichlet`, one flat Dirichlet row per
    /// state drawn from the config seed.
    Jittered { weight: f64 },
    Explicit(Policy),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub eta_pi: f64,
    pub eta_mu: f64,
    pub iterations: usize,
    pub stride: usize,
    /// `None` starts from `μ = 0`.
    pub mu_init: Option<Multipliers>,
    pub policy_init: PolicyInit,
    pub mu_cap: Option<f64>,
    pub optimism: bool,
    pub seed: u64,
    /// Occupancy-space step size; `None` uses `0.4 / L̂`.
    pub occupancy_eta: Option<f64>,
    /// Starting point of the occupancy-space solver, which need not lie in
    /// `K`. Overrides `policy_init` there.
    pub occupancy_init: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta_pi: 0.1,
            eta_mu: 0.1,
            iterations: 1000,
            stride: 1,
            mu_init: None,
            policy_init: PolicyInit::Uniform,
            mu_cap: Some(DEFAULT_MU_CAP),
            optimism: true,
            seed: 0,
            occupancy_eta: None,
            occupancy_init: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(parameter("need at least one iteration"));
        }
        if self.stride == 0 {
            return Err(parameter("stride must be positive"));
        }
        for (name, eta) in [("eta_pi", self.eta_pi), ("eta_mu", self.eta_mu)] {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(parameter(format!("{name} must be positive, got {eta}")));
            }
        }
        if let Some(cap) = self.mu_cap {
            if !(cap > 0.0) {
                return Err(parameter(format!("mu_cap must be positive, got {cap}")));
            }
        }
        if let Some(eta) = self.occupancy_eta {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(parameter(format!("occupancy_eta must be positive, got {eta}")));
            }
        }
        if let PolicyInit::Jittered { weight } = self.policy_init {
            if !(0.0..=1.0).contains(&weight) {
                return Err(parameter(format!("jitter weight {weight} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn initial_policy(&self, cmdp: &Cmdp) -> Result<Policy> {
        let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
        match &self.policy_init {
            PolicyInit::Uniform => Ok(Policy::uniform(ns, na)),
            PolicyInit::Jittered { weight } => {
                let mut rng = SplitMix64::new(self.seed);
                let mut probs = Vec::with_capacity(ns * na);
                for _ in 0..ns {
                    let row = rng.dirichlet(na);
                    let mut mixed: Vec<f64> = row.iter().map(|p| (1.0 - weight) / na as f64 + weight * p).collect();
                    let total: f64 = mixed.iter().sum();
                    mixed.iter_mut().for_each(|x| *x /= total);
                    probs.extend(mixed);
                }
                Policy::new(ns, na, probs)
            }
            PolicyInit::Explicit(p) => {
                if p.n_states() != ns || p.n_actions() != na {
                    return Err(parameter("initial policy does not match the cmdp"));
                }
                Ok(p.clone())
            }
        }
    }

    pub fn initial_mu(&self, cmdp: &Cmdp) -> Result<Vec<f64>> {
        let mu = match &self.mu_init {
            None => vec![0.0; cmdp.n_constraints()],
            Some(m) => {
                if m.len() != cmdp.n_constraints() {
                    return Err(parameter(format!(
                        "{} initial multipliers for {} constraints",
                        m.len(),
                        cmdp.n_constraints()
                    )));
                }
                Multipliers::new(m.0.clone())?.0
            }
        };
        Ok(mu.into_iter().map(|m| m.min(self.cap())).collect())
    }

    pub(crate) fn cap(&self) -> f64 {
        self.mu_cap.unwrap_or(f64::INFINITY)
    }
}
