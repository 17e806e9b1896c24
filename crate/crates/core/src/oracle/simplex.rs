//! Dense two-phase revised simplex for `min cᵀx, A x = b, x ≥ 0`.

use crate::error::{Error, Result};
use crate::linalg::LuFactors;

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots after which pricing falls back to Bland.
const DEGENERATE_RUN: usize = 30;
const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Row duals `y` with `cⱼ − yᵀAⱼ ≥ 0` at optimality.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub basis: Vec<usize>,
    /// Some basic variable sits at zero.
    pub degenerate: bool,
    /// `max_j (yᵀAⱼ − cⱼ)` over nonbasic structural columns.
    pub max_reduced_cost: f64,
    pub pivots: usize,
    /// Phase-1 infeasibility `Σ artificials`.
    pub infeasibility: f64,
}

/// Standard-form problem, `a` row-major `rows × cols`, requires `b ≥ 0`.
pub struct StandardLp {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Columns usable as an initial basis (an identity column per row), or
    /// `None` where an artificial variable is needed.
    pub start: Vec<Option<usize>>,
}

struct Tableau<'a> {
    lp: &'a StandardLp,
    /// Structural columns followed by one artificial per row.
    n_total: usize,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl<'a> Tableau<'a> {
    fn column(&self, j: usize) -> Vec<f64> {
        let (m, n) = (self.lp.rows, self.lp.cols);
        if j < n {
            (0..m).map(|i| self.lp.a[i * n + j]).collect()
        } else {
            let mut e = vec![0.0; m];
            e[j - n] = 1.0;
            e
        }
    }

    fn binv_times(&self, v: &[f64]) -> Vec<f64> {
        let m = self.lp.rows;
        (0..m)
            .map(|i| self.binv[i * m..(i + 1) * m].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.lp.rows;
        let mut bmat = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                bmat[i * m + k] = v;
            }
        }
        let lu = LuFactors::factor(bmat, m).map_err(|e| Error::Oracle(format!("basis became singular: {e}")))?;
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            for (k, v) in lu.solve(&e).into_iter().enumerate() {
                binv[k * m + i] = v;
            }
        }
        self.binv = binv;
        self.xb = self.binv_times(&self.lp.b);
        self.since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.lp.rows;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                for (yi, bi) in y.iter_mut().zip(&self.binv[k * m..(k + 1) * m]) {
                    *yi += cb * bi;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        let (m, n) = (self.lp.rows, self.lp.cols);
        if j < n {
            cost[j] - (0..m).map(|i| y[i] * self.lp.a[i * n + j]).sum::<f64>()
        } else {
            cost[j] - y[j - n]
        }
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &[f64]) -> Result<()> {
        let m = self.lp.rows;
        let piv = u[row];
        let pivot_row: Vec<f64> = self.binv[row * m..(row + 1) * m].iter().map(|x| x / piv).collect();
        let theta = self.xb[row] / piv;
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = u[i];
            if f != 0.0 {
                for (dst, p) in self.binv[i * m..(i + 1) * m].iter_mut().zip(&pivot_row) {
                    *dst -= f * p;
                }
                self.xb[i] -= f * theta;
            }
        }
        self.binv[row * m..(row + 1) * m].copy_from_slice(&pivot_row);
        self.xb[row] = theta;
        self.basis[row] = entering;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Runs the simplex on `cost` over the columns allowed by `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool, cap: usize) -> Result<()> {
        let mut degenerate_run = 0;
        loop {
            if self.pivots >= cap {
                return Err(Error::Oracle(format!(
                    "simplex exceeded {cap} pivots; basis = {:?}",
                    self.basis
                )));
            }
            let y = self.duals(cost);
            let in_basis = {
                let mut f = vec![false; self.n_total];
                for &j in &self.basis {
                    f[j] = true;
                }
                f
            };
            let bland = degenerate_run >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -FEAS_TOL;
            for j in 0..self.n_total {
                if in_basis[j] || !allowed(j) {
                    continue;
                }
                let rc = self.reduced_cost(cost, &y, j);
                if rc < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(j) = entering else { return Ok(()) };
            let u = self.binv_times(&self.column(j));
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.lp.rows {
                if u[i] > PIVOT_TOL {
                    let ratio = self.xb[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((r, best_ratio)) => {
                            ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Oracle(format!("linear program is unbounded along column {j}")));
            };
            degenerate_run = if ratio <= PIVOT_TOL { degenerate_run + 1 } else { 0 };
            self.pivot(row, j, &u)?;
        }
    }
}

pub fn solve_standard(lp: &StandardLp) -> Result<LpSolution> {
    let (m, n) = (lp.rows, lp.cols);
    debug_assert!(lp.b.iter().all(|&x| x >= 0.0));
    let n_total = n + m;
    let basis: Vec<usize> = (0..m).map(|i| lp.start[i].unwrap_or(n + i)).collect();
    let mut t = Tableau {
        lp,
        n_total,
        basis,
        binv: vec![0.0; m * m],
        xb: vec![0.0; m],
        pivots: 0,
        since_refactor: 0,
    };
    t.refactor()?;
    let cap = 50 * (m + n_total) + 1000;

    let mut phase1 = vec![0.0; n_total];
    for i in 0..m {
        if lp.start[i].is_none() {
            phase1[n + i] = 1.0;
        }
    }
    let needs_phase1 = lp.start.iter().any(Option::is_none);
    let mut infeasibility = 0.0;
    if needs_phase1 {
        t.optimize(&phase1, &|_| true, cap)?;
        infeasibility = t
            .basis
            .iter()
            .zip(&t.xb)
            .filter(|(&j, _)| j >= n)
            .map(|(_, &x)| x.max(0.0))
            .sum();
        if infeasibility > FEAS_TOL {
            return Ok(finish(&t, &phase1, LpStatus::Infeasible, infeasibility));
        }
        // Drive zero-level artificials out where a structural column can
        // replace them; rows where none can are redundant.
        for row in 0..m {
            if t.basis[row] < n {
                continue;
            }
            let y_row: Vec<f64> = t.binv[row * m..(row + 1) * m].to_vec();
            let in_basis: Vec<bool> = {
                let mut f = vec![false; n_total];
                for &j in &t.basis {
                    f[j] = true;
                }
                f
            };
            let candidate = (0..n).find(|&j| {
                !in_basis[j] && {
                    let col = t.column(j);
                    y_row.iter().zip(&col).map(|(a, b)| a * b).sum::<f64>().abs() > 1e-7
                }
            });
            if let Some(j) = candidate {
                let u = t.binv_times(&t.column(j));
                t.pivot(row, j, &u)?;
            }
        }
    }
    let mut cost = lp.c.clone();
    cost.extend(std::iter::repeat(0.0).take(m));
    t.optimize(&cost, &|j| j < n, cap)?;
    t.refactor()?;
    Ok(finish(&t, &cost, LpStatus::Optimal, infeasibility))
}

fn finish(t: &Tableau, cost: &[f64], status: LpStatus, infeasibility: f64) -> LpSolution {
    let n = t.lp.cols;
    let mut x = vec![0.0; n];
    let mut degenerate = false;
    for (&j, &v) in t.basis.iter().zip(&t.xb) {
        if v.abs() <= PIVOT_TOL {
            degenerate = true;
        }
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    let y = t.duals(cost);
    let mut in_basis = vec![false; t.n_total];
    for &j in &t.basis {
        in_basis[j] = true;
    }
    let max_reduced_cost = (0..n)
        .filter(|&j| !in_basis[j])
        .map(|j| -t.reduced_cost(cost, &y, j))
        .fold(f64::NEG_INFINITY, f64::max);
    let objective = x.iter().zip(&t.lp.c).map(|(a, b)| a * b).sum();
    LpSolution {
        status,
        x,
        duals: y,
        objective,
        basis: t.basis.clone(),
        degenerate,
        max_reduced_cost,
        pivots: t.pivots,
        infeasibility,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_with_known_optimum() {
        // min −x − y  s.t. x + 2y + s₁ = 4, 3x + y + s₂ = 6 → (1.6, 1.2).
        let lp = StandardLp {
            rows: 2,
            cols: 4,
            a: vec![1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0],
            b: vec![4.0, 6.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
            start: vec![Some(2), Some(3)],
        };
        let sol = solve_standard(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
        assert!((sol.objective + 2.8).abs() < 1e-12);
        // Dual objective equals the primal one.
        let dual: f64 = sol.duals.iter().zip(&lp.b).map(|(y, b)| y * b).sum();
        assert!((dual + 2.8).abs() < 1e-12);
        assert!(sol.max_reduced_cost <= 1e-9);
    }

    #[test]
    fn phase_one_detects_infeasibility() {
        // x = 1 and x = 2 cannot both hold.
        let lp = StandardLp {
            rows: 2,
            cols: 1,
            a: vec![1.0, 1.0],
            b: vec![1.0, 2.0],
            c: vec![0.0],
            start: vec![None, None],
        };
        assert_eq!(solve_standard(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = StandardLp {
            rows: 2,
            cols: 2,
            a: vec![1.0, 1.0, 2.0, 2.0],
            b: vec![1.0, 2.0],
            c: vec![1.0, 2.0],
            start: vec![None, None],
        };
        let sol = solve_standard(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }
}
