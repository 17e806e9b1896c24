//! Independent reference computations shared by the integration tests. None
//! of these reuse the library's solvers: occupancies and values come from
//! plain fixed-point iteration, roots from Durand–Kerner, projections from
//! grid search.

#![allow(dead_code)]

pub mod invariants;

use reload_core::cmdp::{Cmdp, Policy};
use reload_core::envs::SplitMix64;

/// `d = (1−γ) Σ_t γᵗ ρᵀ P_πᵗ`, iterated to machine precision.
pub fn iterative_occupancy(cmdp: &Cmdp, pi: &Policy) -> Vec<f64> {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let g = cmdp.gamma();
    let mut state = cmdp.rho().to_vec();
    let mut acc = vec![0.0; ns];
    let mut weight = 1.0 - g;
    while weight > 1e-18 {
        for s in 0..ns {
            acc[s] += weight * state[s];
        }
        let mut next = vec![0.0; ns];
        for s in 0..ns {
            for a in 0..na {
                let w = state[s] * pi.prob(s, a);
                for (n, p) in next.iter_mut().zip(cmdp.transition(s, a)) {
                    *n += w * p;
                }
            }
        }
        state = next;
        weight *= g;
    }
    (0..ns * na).map(|i| acc[i / na] * pi.prob(i / na, i % na)).collect()
}

/// Bellman iteration `q ← r + γ P (π·q)` to a fixed point.
pub fn iterative_q(cmdp: &Cmdp, pi: &Policy, reward: &[f64]) -> Vec<f64> {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let mut q = vec![0.0; ns * na];
    for _ in 0..100_000 {
        let v: Vec<f64> = (0..ns)
            .map(|s| (0..na).map(|a| pi.prob(s, a) * q[s * na + a]).sum())
            .collect();
        let mut next = reward.to_vec();
        for s in 0..ns {
            for a in 0..na {
                next[s * na + a] += cmdp.gamma() * cmdp.transition(s, a).iter().zip(&v).map(|(p, x)| p * x).sum::<f64>();
            }
        }
        let diff = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        q = next;
        if diff < 1e-15 {
            break;
        }
    }
    q
}

/// Optimal normalized value `(1−γ)ρᵀv*` of reward `r` by value iteration.
pub fn value_iteration(cmdp: &Cmdp, reward: &[f64]) -> f64 {
    let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
    let mut v = vec![0.0; ns];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..ns)
            .map(|s| {
                (0..na)
                    .map(|a| {
                        reward[s * na + a]
                            + cmdp.gamma() * cmdp.transition(s, a).iter().zip(&v).map(|(p, x)| p * x).sum::<f64>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let diff = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if diff < 1e-14 {
            break;
        }
    }
    (1.0 - cmdp.gamma()) * cmdp.rho().iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
}

/// Roots of the monic cubic `λ³ + c2λ² + c1λ + c0` by Durand–Kerner.
pub fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [(f64, f64); 3] {
    type C = (f64, f64);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let sub = |a: C, b: C| (a.0 - b.0, a.1 - b.1);
    let div = |a: C, b: C| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    let p = |z: C| {
        let z2 = mul(z, z);
        let z3 = mul(z2, z);
        (z3.0 + c2 * z2.0 + c1 * z.0 + c0, z3.1 + c2 * z2.1 + c1 * z.1)
    };
    let mut r: [C; 3] = [(0.4, 0.9), (0.4f64.powi(2) - 0.81, 2.0 * 0.4 * 0.9), (0.0, 0.0)];
    r[2] = mul(r[1], (0.4, 0.9));
    for _ in 0..2000 {
        for i in 0..3 {
            let mut den = (1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den = mul(den, sub(r[i], r[j]));
                }
            }
            r[i] = sub(r[i], div(p(r[i]), den));
        }
    }
    r
}

/// Random row-stochastic policy.
pub fn random_policy(rng: &mut SplitMix64, ns: usize, na: usize) -> Policy {
    let probs: Vec<f64> = (0..ns).flat_map(|_| rng.dirichlet(na)).collect();
    Policy::new(ns, na, probs).expect("dirichlet rows are distributions")
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Nearest point of `K` on a 2-state, 2-action instance by grid refinement
/// over convex weights of the deterministic-policy occupancies, which are the
/// vertices of `K`.
pub fn grid_projection_2x2(cmdp: &Cmdp, z: &[f64]) -> Vec<f64> {
    assert_eq!((cmdp.n_states(), cmdp.n_actions()), (2, 2));
    let vertices: Vec<Vec<f64>> = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .iter()
        .map(|acts| iterative_occupancy(cmdp, &Policy::deterministic(2, acts).unwrap()))
        .collect();
    let point = |w: &[f64; 4]| -> Vec<f64> {
        (0..4).map(|i| (0..4).map(|v| w[v] * vertices[v][i]).sum()).collect()
    };
    let mut best_w = [0.25; 4];
    let mut best = dist(&point(&best_w), z);
    let mut step = 0.25;
    while step > 1e-13 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..4 {
                for j in 0..4 {
                    if i == j || best_w[j] < step {
                        continue;
                    }
                    let mut w = best_w;
                    w[i] += step;
                    w[j] -= step;
                    let d = dist(&point(&w), z);
                    if d < best - 1e-16 {
                        best = d;
                        best_w = w;
                        improved = true;
                    }
                }
            }
        }
        step /= 2.0;
    }
    point(&best_w)
}
