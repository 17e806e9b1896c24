//! Euclidean projection onto the flow polytope `K`.

use crate::cmdp::model::{flow_residual, Cmdp, OccupancyMeasure};
use crate::error::{parameter, Error, Result};
use crate::linalg::LuFactors;

pub const MAX_SWEEPS: usize = 100_000;

/// Flow constraints `A d = b` with `A = [δ(s, s') − γ P(s | s', a')]` and
/// `b = (1−γ)ρ`, plus a cached factorization of `A Aᵀ`.
pub struct FlowProjector<'a> {
    cmdp: &'a Cmdp,
    a: Vec<f64>,
    b: Vec<f64>,
    normal: LuFactors,
}

impl<'a> FlowProjector<'a> {
    pub fn new(cmdp: &'a Cmdp) -> Result<Self> {
        let (ns, na) = (cmdp.n_states(), cmdp.n_actions());
        let m = ns * na;
        let mut a = vec![0.0; ns * m];
        for sp in 0..ns {
            for ap in 0..na {
                let col = sp * na + ap;
                a[sp * m + col] += 1.0;
                for (s, p) in cmdp.transition(sp, ap).iter().enumerate() {
                    a[s * m + col] -= cmdp.gamma() * p;
                }
            }
        }
        let b = cmdp.rho().iter().map(|r| (1.0 - cmdp.gamma()) * r).collect();
        let normal = LuFactors::factor(gram(&a, ns, m, None), ns)?;
        Ok(Self { cmdp, a, b, normal })
    }

    fn dims(&self) -> (usize, usize) {
        (self.cmdp.n_states(), self.cmdp.n_pairs())
    }

    /// `z − Aᵀ(AAᵀ)⁻¹(Az − b)`.
    pub fn project_affine(&self, z: &[f64]) -> Vec<f64> {
        let (ns, m) = self.dims();
        let resid: Vec<f64> = (0..ns)
            .map(|s| self.a[s * m..(s + 1) * m].iter().zip(z).map(|(x, y)| x * y).sum::<f64>() - self.b[s])
            .collect();
        let lambda = self.normal.solve(&resid);
        let mut out = z.to_vec();
        for (s, l) in lambda.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(&self.a[s * m..(s + 1) * m]) {
                *o -= l * x;
            }
        }
        out
    }

    /// Dykstra's alternating projections between the affine flow set and
    /// the orthant, finished by an exact solve on the detected active set.
    pub fn project(&self, z: &[f64], tol: f64) -> Result<OccupancyMeasure> {
        let (ns, m) = self.dims();
        if z.len() != m {
            return Err(parameter(format!("point has {} entries, expected {m}", z.len())));
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(parameter("point must be finite"));
        }
        if tol <= 0.0 {
            return Err(parameter(format!("tolerance {tol} must be positive")));
        }
        let wrap = |d: Vec<f64>| OccupancyMeasure::new(ns, self.cmdp.n_actions(), d);
        let mut x = z.to_vec();
        let mut p = vec![0.0; m];
        let mut q = vec![0.0; m];
        let mut next_polish = 1;
        let mut change = f64::INFINITY;
        for sweep in 1..=MAX_SWEEPS {
            let shifted: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
            let y = self.project_affine(&shifted);
            for i in 0..m {
                p[i] = shifted[i] - y[i];
            }
            let mut new_x = vec![0.0; m];
            for i in 0..m {
                let t = y[i] + q[i];
                new_x[i] = t.max(0.0);
                q[i] = t - new_x[i];
            }
            change = new_x.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            x = new_x;
            if sweep == next_polish || change < tol {
                if let Some(d) = self.polish(z, &x) {
                    return wrap(d);
                }
                next_polish = if next_polish < 64 { next_polish * 2 } else { next_polish + 64 };
            }
            if change < tol {
                return wrap(x);
            }
        }
        Err(Error::Convergence {
            iterations: MAX_SWEEPS,
            residual: change,
        })
    }

    /// Solves `min ½‖d − z‖²` with `A d = b` and `d = 0` on the zero set of
    /// `guess`, returning it only if the full KKT conditions hold.
    fn polish(&self, z: &[f64], guess: &[f64]) -> Option<Vec<f64>> {
        let (ns, m) = self.dims();
        let free: Vec<bool> = guess.iter().map(|&g| g > 0.0).collect();
        let normal = LuFactors::factor(gram(&self.a, ns, m, Some(&free)), ns).ok()?;
        let resid: Vec<f64> = (0..ns)
            .map(|s| {
                (0..m)
                    .filter(|&i| free[i])
                    .map(|i| self.a[s * m + i] * z[i])
                    .sum::<f64>()
                    - self.b[s]
            })
            .collect();
        let lambda = normal.solve(&resid);
        let scale = z.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let kkt_tol = 1e-11 * scale;
        let mut d = vec![0.0; m];
        for i in 0..m {
            let at_lambda: f64 = (0..ns).map(|s| self.a[s * m + i] * lambda[s]).sum();
            if free[i] {
                d[i] = z[i] - at_lambda;
                if d[i] < -kkt_tol {
                    return None;
                }
                d[i] = d[i].max(0.0);
            } else if at_lambda - z[i] < -kkt_tol {
                // The bound multiplier would be negative.
                return None;
            }
        }
        if flow_residual(self.cmdp, &d) > 1e-10 {
            return None;
        }
        Some(d)
    }
}

/// `A_F A_Fᵀ` over the columns flagged in `cols` (all if `None`).
fn gram(a: &[f64], rows: usize, cols: usize, mask: Option<&[bool]>) -> Vec<f64> {
    let mut g = vec![0.0; rows * rows];
    for i in 0..rows {
        for j in i..rows {
            let s: f64 = (0..cols)
                .filter(|&c| mask.map_or(true, |f| f[c]))
                .map(|c| a[i * cols + c] * a[j * cols + c])
                .sum();
            g[i * rows + j] = s;
            g[j * rows + i] = s;
        }
    }
    g
}

/// Euclidean projection of `z` onto `K`.
pub fn project_onto_k(cmdp: &Cmdp, z: &[f64], tol: f64) -> Result<OccupancyMeasure> {
    FlowProjector::new(cmdp)?.project(z, tol)
}
