use serde::{Deserialize, Serialize};

use crate::cmdp::{policy_from_occupancy, Cmdp, Multipliers, OccupancyMeasure, Policy};
use crate::error::{precondition, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmdpRecord {
    pub iteration: usize,
    pub policy: Policy,
    pub occupancy: OccupancyMeasure,
    pub mu: Vec<f64>,
    /// `v₀..v_N` of the record's occupancy.
    pub values: Vec<f64>,
    pub lagrangian: f64,
    /// Running means over every iterate `0..=iteration`, recorded or not.
    pub mean_values: Vec<f64>,
    pub mean_mu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmdpTrace {
    pub solver: String,
    pub recorded_every: usize,
    pub iterations: usize,
    pub records: Vec<CmdpRecord>,
    pub thresholds: Vec<f64>,
    /// Uniform mean of all occupancies `d⁰..d^K`.
    pub mean_occupancy: Vec<f64>,
    pub mean_mu: Vec<f64>,
}

impl CmdpTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &CmdpRecord {
        self.records.last().expect("traces are never empty")
    }

    pub fn value_series(&self, n: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.values[n]).collect()
    }

    pub fn mu_series(&self, n: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.mu[n]).collect()
    }

    pub fn mean_value_series(&self, n: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.mean_values[n]).collect()
    }
}

pub(crate) struct TraceBuilder {
    trace: CmdpTrace,
    sum_d: Vec<f64>,
    sum_mu: Vec<f64>,
    sum_v: Vec<f64>,
    count: usize,
}

impl TraceBuilder {
    pub fn new(solver: &str, cmdp: &Cmdp, stride: usize, iterations: usize) -> Self {
        Self {
            trace: CmdpTrace {
                solver: solver.to_string(),
                recorded_every: stride,
                iterations,
                records: Vec::new(),
                thresholds: cmdp.thresholds(),
                mean_occupancy: Vec::new(),
                mean_mu: Vec::new(),
            },
            sum_d: vec![0.0; cmdp.n_pairs()],
            sum_mu: vec![0.0; cmdp.n_constraints()],
            sum_v: vec![0.0; cmdp.n_constraints() + 1],
            count: 0,
        }
    }

    /// Folds iterate `k` into the averages and records it if due.
    pub fn push(&mut self, k: usize, policy: &Policy, d: &OccupancyMeasure, mu: &[f64], values: &[f64]) {
        for (s, x) in self.sum_d.iter_mut().zip(d.values()) {
            *s += x;
        }
        for (s, x) in self.sum_mu.iter_mut().zip(mu) {
            *s += x;
        }
        for (s, x) in self.sum_v.iter_mut().zip(values) {
            *s += x;
        }
        self.count += 1;
        let t = &self.trace;
        if crate::minmax::game::is_recorded(k, t.recorded_every, t.iterations) {
            let c = self.count as f64;
            let lagrangian = crate::cmdp::lagrangian_from_values(values, &t.thresholds, mu);
            self.trace.records.push(CmdpRecord {
                iteration: k,
                policy: policy.clone(),
                occupancy: d.clone(),
                mu: mu.to_vec(),
                values: values.to_vec(),
                lagrangian,
                mean_values: self.sum_v.iter().map(|x| x / c).collect(),
                mean_mu: self.sum_mu.iter().map(|x| x / c).collect(),
            });
        }
    }

    pub fn finish(mut self) -> CmdpTrace {
        let c = self.count.max(1) as f64;
        self.trace.mean_occupancy = self.sum_d.iter().map(|x| x / c).collect();
        self.trace.mean_mu = self.sum_mu.iter().map(|x| x / c).collect();
        self.trace
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Averaging {
    Last,
    Averaged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleEstimate {
    pub policy: Policy,
    pub occupancy: OccupancyMeasure,
    pub mu: Multipliers,
}

/// The last record, or the uniform mean over all iterates with the policy
/// read off the mean occupancy.
pub fn extract_saddle_estimate(trace: &CmdpTrace, averaging: Averaging) -> Result<SaddleEstimate> {
    let last = trace.records.last().ok_or_else(|| precondition("empty trace"))?;
    match averaging {
        Averaging::Last => Ok(SaddleEstimate {
            policy: last.policy.clone(),
            occupancy: last.occupancy.clone(),
            mu: Multipliers(last.mu.clone()),
        }),
        Averaging::Averaged => {
            let d = OccupancyMeasure::new(
                last.occupancy.n_states(),
                last.occupancy.n_actions(),
                trace.mean_occupancy.clone(),
            )?;
            Ok(SaddleEstimate {
                policy: policy_from_occupancy(&d),
                occupancy: d,
                mu: Multipliers(trace.mean_mu.clone()),
            })
        }
    }
}
