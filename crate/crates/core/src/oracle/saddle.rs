//! The CMDP linear program over occupancy measures and its saddle point.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cmdp::eval::dot;
use crate::cmdp::{Cmdp, Multipliers, OccupancyMeasure};
use crate::error::{parameter, Error, Result};
use crate::oracle::simplex::{solve_standard, LpSolution, LpStatus, StandardLp, PIVOT_TOL};

/// Fraction of the achievable range inside which a threshold is extreme.
pub const EXTREME_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SaddleStatus {
    Optimal,
    Infeasible,
    /// Optimal, but some threshold lies at an end of its achievable range.
    ThresholdExtreme,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub d_star: OccupancyMeasure,
    pub mu_star: Multipliers,
    pub primal_value: f64,
    pub dual_value: f64,
    pub status: SaddleStatus,
    pub degenerate: bool,
    /// Largest reduced cost over nonbasic columns in maximization form.
    pub max_reduced_cost: f64,
}

impl SaddlePoint {
    pub fn is_optimal(&self) -> bool {
        self.status != SaddleStatus::Infeasible
    }

    /// `⟨rₙ, d*⟩` for `n = 0..=N`.
    pub fn values(&self, cmdp: &Cmdp) -> Vec<f64> {
        crate::cmdp::values_of_occupancy(cmdp, self.d_star.values())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n_states": self.d_star.n_states(),
            "n_actions": self.d_star.n_actions(),
            "d_star": self.d_star.values(),
            "mu_star": self.mu_star.as_slice(),
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "status": self.status,
            "degenerate": self.degenerate,
            "max_reduced_cost": self.max_reduced_cost,
        })
    }
}

/// Result of `max ⟨objective, d⟩` over `K` intersected with extra `≤` rows.
#[derive(Debug, Clone)]
pub struct KProgram {
    pub status: LpStatus,
    pub d: Vec<f64>,
    pub value: f64,
    /// Multipliers of the `≤` rows, nonnegative at optimality.
    pub ineq_duals: Vec<f64>,
    /// Value of the dual objective.
    pub dual_value: f64,
    pub degenerate: bool,
    pub max_reduced_cost: f64,
}

/// Solves `max ⟨objective, d⟩` s.t. flow equalities, `d ≥ 0` and
/// `⟨cₙ, d⟩ ≤ tₙ` for every `(cₙ, tₙ)` in `rows`.
pub fn maximize_over_k(cmdp: &Cmdp, objective: &[f64], rows: &[(&[f64], f64)]) -> Result<KProgram> {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let m_pairs = ns * na;
    if objective.len() != m_pairs || rows.iter().any(|(c, _)| c.len() != m_pairs) {
        return Err(parameter("objective and constraint rows must be S×A"));
    }
    let n_ineq = rows.len();
    let n_rows = ns + n_ineq;
    let n_cols = m_pairs + n_ineq;
    let mut a = vec![0.0; n_rows * n_cols];
    let mut b = vec![0.0; n_rows];
    for sp in 0..ns {
        for ap in 0..na {
            let col = sp * na + ap;
            a[sp * n_cols + col] += 1.0;
            for (s, p) in cmdp.transition(sp, ap).iter().enumerate() {
                a[s * n_cols + col] -= cmdp.gamma() * p;
            }
        }
    }
    for (s, r) in cmdp.rho().iter().enumerate() {
        b[s] = (1.0 - cmdp.gamma()) * r;
    }
    let mut start = vec![None; n_rows];
    let mut sign = vec![1.0; n_ineq];
    for (k, (c, t)) in rows.iter().enumerate() {
        let row = ns + k;
        sign[k] = if *t < 0.0 { -1.0 } else { 1.0 };
        for (j, x) in c.iter().enumerate() {
            a[row * n_cols + j] = sign[k] * x;
        }
        a[row * n_cols + m_pairs + k] = sign[k];
        b[row] = sign[k] * t;
        if sign[k] > 0.0 {
            start[row] = Some(m_pairs + k);
        }
    }
    let mut c: Vec<f64> = objective.iter().map(|x| -x).collect();
    c.extend(std::iter::repeat(0.0).take(n_ineq));
    let lp = StandardLp {
        rows: n_rows,
        cols: n_cols,
        a,
        b,
        c,
        start,
    };
    let sol: LpSolution = solve_standard(&lp)?;
    let d = sol.x[..m_pairs].to_vec();
    let ineq_duals = (0..n_ineq).map(|k| -sign[k] * sol.duals[ns + k]).collect();
    let dual_value = -sol.duals.iter().zip(&lp.b).map(|(y, b)| y * b).sum::<f64>();
    Ok(KProgram {
        status: sol.status,
        value: dot(objective, &d),
        d,
        ineq_duals,
        dual_value,
        degenerate: sol.degenerate,
        max_reduced_cost: sol.max_reduced_cost,
    })
}

/// Exact saddle point of the CMDP Lagrangian by linear programming.
pub fn solve_cmdp_lp(cmdp: &Cmdp) -> Result<SaddlePoint> {
    let rows: Vec<(&[f64], f64)> = cmdp
        .constraints()
        .iter()
        .map(|c| (c.reward.as_slice(), c.threshold))
        .collect();
    let prog = maximize_over_k(cmdp, cmdp.task_reward(), &rows)?;
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    if prog.status == LpStatus::Infeasible {
        return Ok(SaddlePoint {
            d_star: OccupancyMeasure::new(ns, na, prog.d)?,
            mu_star: Multipliers::zeros(cmdp.n_constraints()),
            primal_value: f64::NAN,
            dual_value: f64::NAN,
            status: SaddleStatus::Infeasible,
            degenerate: prog.degenerate,
            max_reduced_cost: prog.max_reduced_cost,
        });
    }
    let mu: Vec<f64> = prog.ineq_duals.iter().map(|m| m.max(0.0)).collect();
    if prog.ineq_duals.iter().any(|&m| m < -1e-8) {
        return Err(Error::Oracle(format!("negative constraint dual {:?}", prog.ineq_duals)));
    }
    let mut status = SaddleStatus::Optimal;
    for n in 0..cmdp.n_constraints() {
        if classify_threshold(cmdp, n)? != ThresholdClass::Intermediate {
            status = SaddleStatus::ThresholdExtreme;
        }
    }
    Ok(SaddlePoint {
        d_star: OccupancyMeasure::new(ns, na, prog.d)?,
        mu_star: Multipliers(mu),
        primal_value: prog.value,
        dual_value: prog.dual_value,
        status,
        degenerate: prog.degenerate,
        max_reduced_cost: prog.max_reduced_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdClass {
    ExtremeLow,
    ExtremeHigh,
    Intermediate,
}

/// `[min, max]` of `⟨r, d⟩` over `K`.
pub fn achievable_range(cmdp: &Cmdp, reward: &[f64]) -> Result<(f64, f64)> {
    let hi = maximize_over_k(cmdp, reward, &[])?.value;
    let neg: Vec<f64> = reward.iter().map(|x| -x).collect();
    let lo = -maximize_over_k(cmdp, &neg, &[])?.value;
    Ok((lo, hi))
}

/// Places `θₙ` (0-based `n`) relative to the achievable range of `vₙ`.
pub fn classify_threshold(cmdp: &Cmdp, n: usize) -> Result<ThresholdClass> {
    let c = cmdp
        .constraints()
        .get(n)
        .ok_or_else(|| parameter(format!("constraint index {n} out of range")))?;
    let (lo, hi) = achievable_range(cmdp, &c.reward)?;
    Ok(classify_in_range(c.threshold, lo, hi))
}

pub fn classify_in_range(theta: f64, lo: f64, hi: f64) -> ThresholdClass {
    let band = EXTREME_FRACTION * (hi - lo);
    if theta <= lo + band + PIVOT_TOL {
        ThresholdClass::ExtremeLow
    } else if theta >= hi - band - PIVOT_TOL {
        ThresholdClass::ExtremeHigh
    } else {
        ThresholdClass::Intermediate
    }
}
