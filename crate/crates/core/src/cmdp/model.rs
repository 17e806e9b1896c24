//! Tabular CMDP data: the model, policies, occupancy measures and
//! multipliers, plus the JSON file format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// One constraint `⟨r_n, d⟩ ≤ θ_n`; `reward` is row-major `S×A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub reward: Vec<f64>,
    pub threshold: f64,
}

/// Infinite-horizon discounted CMDP with dense row-major storage:
/// `kernel[(s·A + a)·S + s']`, rewards `[s·A + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cmdp {
    n_states: usize,
    n_actions: usize,
    gamma: f64,
    rho: Vec<f64>,
    kernel: Vec<f64>,
    r0: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl Cmdp {
    pub fn new(
        n_states: usize,
        n_actions: usize,
        gamma: f64,
        rho: Vec<f64>,
        kernel: Vec<f64>,
        r0: Vec<f64>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let cmdp = Self {
            n_states,
            n_actions,
            gamma,
            rho,
            kernel,
            r0,
            constraints,
        };
        cmdp.validate()?;
        Ok(cmdp)
    }

    pub fn validate(&self) -> Result<()> {
        let (s, a) = (self.n_states, self.n_actions);
        let fail = |m: String| Err(Error::Validation(m));
        if s == 0 || a == 0 {
            return fail("need at least one state and one action".into());
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("discount {} is outside [0, 1)", self.gamma));
        }
        if self.rho.len() != s {
            return fail(format!("rho has {} entries for {s} states", self.rho.len()));
        }
        check_distribution(&self.rho).map_err(|m| Error::Validation(format!("rho: {m}")))?;
        if self.kernel.len() != s * a * s {
            return fail(format!("kernel has {} entries, expected {}", self.kernel.len(), s * a * s));
        }
        for (row, probs) in self.kernel.chunks_exact(s).enumerate() {
            check_distribution(probs)
                .map_err(|m| Error::Validation(format!("kernel row (s={}, a={}): {m}", row / a, row % a)))?;
        }
        if self.r0.len() != s * a || self.r0.iter().any(|r| !r.is_finite()) {
            return fail("task reward must be a finite S×A array".into());
        }
        for (n, c) in self.constraints.iter().enumerate() {
            if c.reward.len() != s * a || c.reward.iter().any(|r| !r.is_finite()) {
                return fail(format!("constraint {} reward must be a finite S×A array", n + 1));
            }
            if !c.threshold.is_finite() {
                return fail(format!("constraint {} threshold is not finite", n + 1));
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_pairs(&self) -> usize {
        self.n_states * self.n_actions
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// `P(·|s, a)`.
    pub fn transition(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.kernel[start..start + self.n_states]
    }

    pub fn task_reward(&self) -> &[f64] {
        &self.r0
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Reward `n`: 0 is the task reward, `1..=N` the constraint rewards.
    pub fn reward(&self, n: usize) -> &[f64] {
        if n == 0 {
            &self.r0
        } else {
            &self.constraints[n - 1].reward
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.threshold).collect()
    }

    pub fn with_threshold(&self, n: usize, theta: f64) -> Result<Self> {
        if n >= self.constraints.len() {
            return Err(Error::Parameter(format!(
                "constraint index {n} out of range for {} constraints",
                self.constraints.len()
            )));
        }
        let mut out = self.clone();
        out.constraints[n].threshold = theta;
        out.validate()?;
        Ok(out)
    }

    pub fn to_file(&self) -> CmdpFile {
        let (s, a) = (self.n_states, self.n_actions);
        let table = |v: &[f64]| v.chunks_exact(a).map(|r| r.to_vec()).collect::<Vec<_>>();
        CmdpFile {
            n_states: s,
            n_actions: a,
            gamma: self.gamma,
            rho: self.rho.clone(),
            kernel: self
                .kernel
                .chunks_exact(a * s)
                .map(|per_state| per_state.chunks_exact(s).map(|r| r.to_vec()).collect())
                .collect(),
            r0: table(&self.r0),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    reward: table(&c.reward),
                    threshold: c.threshold,
                })
                .collect(),
        }
    }

    pub fn from_file(f: CmdpFile) -> Result<Self> {
        let (s, a) = (f.n_states, f.n_actions);
        let flat_table = |t: Vec<Vec<f64>>, what: &str| -> Result<Vec<f64>> {
            if t.len() != s || t.iter().any(|r| r.len() != a) {
                return Err(Error::Validation(format!("{what} must be nested [{s}][{a}]")));
            }
            Ok(t.into_iter().flatten().collect())
        };
        if f.kernel.len() != s || f.kernel.iter().any(|per| per.len() != a || per.iter().any(|r| r.len() != s)) {
            return Err(Error::Validation(format!("kernel must be nested [{s}][{a}][{s}]")));
        }
        let kernel = f.kernel.into_iter().flatten().flatten().collect();
        let r0 = flat_table(f.r0, "r0")?;
        let constraints = f
            .constraints
            .into_iter()
            .enumerate()
            .map(|(n, c)| {
                Ok(Constraint {
                    reward: flat_table(c.reward, &format!("constraint {} reward", n + 1))?,
                    threshold: c.threshold,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(s, a, f.gamma, f.rho, kernel, r0, constraints)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("cmdp serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// On-disk CMDP schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmdpFile {
    pub n_states: usize,
    pub n_actions: usize,
    pub gamma: f64,
    pub rho: Vec<f64>,
    pub kernel: Vec<Vec<Vec<f64>>>,
    pub r0: Vec<Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<ConstraintFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    pub reward: Vec<Vec<f64>>,
    pub threshold: f64,
}

fn check_distribution(p: &[f64]) -> std::result::Result<(), String> {
    if let Some(x) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(format!("entry {x} is not a probability"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(format!("sums to {total}"));
    }
    Ok(())
}

/// Stationary policy `π(a|s)`, row-major `S×A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl Policy {
    pub fn new(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_states * n_actions {
            return Err(Error::Validation("policy has the wrong shape".into()));
        }
        for (s, row) in probs.chunks_exact(n_actions).enumerate() {
            check_distribution(row).map_err(|m| Error::Validation(format!("policy row {s}: {m}")))?;
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
        })
    }

    /// Rows are renormalized; used for iterates that drift by rounding.
    pub(crate) fn from_rows_unchecked(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Self {
        Self {
            n_states,
            n_actions,
            probs,
        }
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            probs: vec![1.0 / n_actions as f64; n_states * n_actions],
        }
    }

    /// The deterministic policy choosing `actions[s]` in state `s`.
    pub fn deterministic(n_actions: usize, actions: &[usize]) -> Result<Self> {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            if a >= n_actions {
                return Err(Error::Parameter(format!("action {a} out of range")));
            }
            probs[s * n_actions + a] = 1.0;
        }
        Self::new(actions.len(), n_actions, probs)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.n_actions + a]
    }

    pub fn max_row_error(&self) -> f64 {
        self.probs
            .chunks_exact(self.n_actions)
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized discounted state-action occupancy, row-major `S×A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyMeasure {
    n_states: usize,
    n_actions: usize,
    d: Vec<f64>,
}

impl OccupancyMeasure {
    pub fn new(n_states: usize, n_actions: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n_states * n_actions {
            return Err(Error::Validation("occupancy has the wrong shape".into()));
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("occupancy must be finite".into()));
        }
        Ok(Self { n_states, n_actions, d })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn into_values(self) -> Vec<f64> {
        self.d
    }

    pub fn mass(&self) -> f64 {
        self.d.iter().sum()
    }

    pub fn state_marginal(&self) -> Vec<f64> {
        self.d.chunks_exact(self.n_actions).map(|r| r.iter().sum()).collect()
    }

    /// Largest violation of the flow equalities of `K` (absolute).
    pub fn flow_residual(&self, cmdp: &Cmdp) -> f64 {
        flow_residual(cmdp, &self.d)
    }

    pub fn min_entry(&self) -> f64 {
        self.d.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `max_s |Σ_a d(s,a) − (1−γ)ρ(s) − γ Σ_{s',a'} P(s|s',a') d(s',a')|`.
pub fn flow_residual(cmdp: &Cmdp, d: &[f64]) -> f64 {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let mut lhs: Vec<f64> = d.chunks_exact(na).map(|r| r.iter().sum()).collect();
    for (s, l) in lhs.iter_mut().enumerate() {
        *l -= (1.0 - cmdp.gamma()) * cmdp.rho()[s];
    }
    for sp in 0..ns {
        for a in 0..na {
            let w = cmdp.gamma() * d[sp * na + a];
            if w != 0.0 {
                for (l, p) in lhs.iter_mut().zip(cmdp.transition(sp, a)) {
                    *l -= w * p;
                }
            }
        }
    }
    lhs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Lagrange multipliers `μ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multipliers(pub Vec<f64>);

impl Multipliers {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if let Some(m) = mu.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return Err(Error::Validation(format!("multiplier {m} is not nonnegative")));
        }
        Ok(Self(mu))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `q_{π, r_n}` together with the state values it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct QValues {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}
