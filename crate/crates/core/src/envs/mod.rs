//! Benchmark CMDPs: the paradoxical two-state problem, constrained Catch and
//! seeded random instances.

mod catch;
mod rng;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use catch::{catch_state, constrained_catch, CatchState, CATCH_CONSTRAINT_COLUMNS};
pub use rng::SplitMix64;

use crate::cmdp::{Cmdp, Constraint};
use crate::error::{parameter, Result};
use crate::oracle::achievable_range;

/// Discount used by every shipped environment unless overridden.
pub const DEFAULT_GAMMA: f64 = 0.9;

/// Two states, two actions. `a₁` moves to `s₁` paying 1, `a₂` moves to `s₂`
/// paying 0; the single constraint reward equals the task reward and
/// `θ = 1/2`.
pub fn paradoxical_cmdp() -> Cmdp {
    let kernel = vec![
        1.0, 0.0, // s₁, a₁
        0.0, 1.0, // s₁, a₂
        1.0, 0.0, // s₂, a₁
        0.0, 1.0, // s₂, a₂
    ];
    let r = vec![1.0, 0.0, 1.0, 0.0];
    Cmdp::new(
        2,
        2,
        DEFAULT_GAMMA,
        vec![0.5, 0.5],
        kernel,
        r.clone(),
        vec![Constraint { reward: r, threshold: 0.5 }],
    )
    .expect("paradoxical cmdp is valid")
}

/// Seeded random CMDP with discount [`DEFAULT_GAMMA`] and uniform `ρ`.
///
/// Draw order: kernel rows `(s, a)` in row-major order (flat Dirichlet), then
/// `r₀`, then each constraint reward (uniform on `[0, 1)`). Each threshold is
/// the midpoint of its achievable range.
pub fn random_cmdp(seed: u64, n_states: usize, n_actions: usize, n_constraints: usize) -> Result<Cmdp> {
    if n_states == 0 || n_actions == 0 {
        return Err(parameter("random cmdp needs at least one state and one action"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut kernel = Vec::with_capacity(n_states * n_actions * n_states);
    for _ in 0..n_states * n_actions {
        let mut row = rng.dirichlet(n_states);
        rng::renormalize(&mut row);
        kernel.extend(row);
    }
    let pairs = n_states * n_actions;
    let r0: Vec<f64> = (0..pairs).map(|_| rng.next_f64()).collect();
    let rewards: Vec<Vec<f64>> = (0..n_constraints)
        .map(|_| (0..pairs).map(|_| rng.next_f64()).collect())
        .collect();
    let rho = vec![1.0 / n_states as f64; n_states];
    let bare = Cmdp::new(n_states, n_actions, DEFAULT_GAMMA, rho.clone(), kernel.clone(), r0.clone(), vec![])?;
    let mut constraints = Vec::with_capacity(n_constraints);
    for reward in rewards {
        let (lo, hi) = achievable_range(&bare, &reward)?;
        constraints.push(Constraint {
            reward,
            threshold: 0.5 * (lo + hi),
        });
    }
    Cmdp::new(n_states, n_actions, DEFAULT_GAMMA, rho, kernel, r0, constraints)
}

/// Copy of `cmdp` with threshold `n` (0-based) replaced.
pub fn with_threshold(cmdp: &Cmdp, n: usize, theta: f64) -> Result<Cmdp> {
    cmdp.with_threshold(n, theta)
}

/// A named environment with scalar parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub name: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

pub const ENV_NAMES: [&str; 3] = ["paradox", "catch", "random"];

impl EnvSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 && v < 1e9 => Ok(v as usize),
            Some(&v) => Err(parameter(format!("{}: `{key}` must be a nonnegative integer, got {v}", self.name))),
        }
    }

    /// Builds the CMDP. Recognized parameters: `catch` takes `rows`, `cols`;
    /// `random` takes `seed`, `states`, `actions`, `constraints`. Every env
    /// accepts `theta` (replaces the first threshold).
    pub fn build(&self) -> Result<Cmdp> {
        let allowed: &[&str] = match self.name.as_str() {
            "paradox" => &["theta"],
            "catch" => &["rows", "cols", "theta"],
            "random" => &["seed", "states", "actions", "constraints", "theta"],
            other => {
                return Err(parameter(format!(
                    "unknown environment `{other}` (expected one of {})",
                    ENV_NAMES.join(", ")
                )))
            }
        };
        if let Some(k) = self.parameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(parameter(format!("environment `{}` has no parameter `{k}`", self.name)));
        }
        let cmdp = match self.name.as_str() {
            "paradox" => paradoxical_cmdp(),
            "catch" => constrained_catch(self.count("rows", 10)?, self.count("cols", 5)?)?,
            _ => random_cmdp(
                self.count("seed", 0)? as u64,
                self.count("states", 5)?,
                self.count("actions", 3)?,
                self.count("constraints", 1)?,
            )?,
        };
        match self.parameters.get("theta") {
            Some(&t) => cmdp.with_threshold(0, t),
            None => Ok(cmdp),
        }
    }
}
