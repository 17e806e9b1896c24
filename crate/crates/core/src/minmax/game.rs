//! Bilinear (optionally strongly monotone) games and the first-order dynamics
//! run on them.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::geometry::{BregmanGeometry, Domain, MirrorMap};
use crate::error::{parameter, precondition, Result};

/// `min_x max_y xᵀMy + (m/2)(‖x‖² − ‖y‖²)` over the given domains.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearGame {
    pub payoff: DMatrix<f64>,
    pub x_domain: Domain,
    pub y_domain: Domain,
    pub strong_monotonicity: f64,
}

impl BilinearGame {
    pub fn new(payoff: DMatrix<f64>, x_domain: Domain, y_domain: Domain, strong_monotonicity: f64) -> Result<Self> {
        if payoff.nrows() == 0 || payoff.ncols() == 0 {
            return Err(parameter("payoff matrix must be nonempty"));
        }
        if !(strong_monotonicity >= 0.0) {
            return Err(parameter("strong monotonicity must be nonnegative"));
        }
        Ok(Self {
            payoff,
            x_domain,
            y_domain,
            strong_monotonicity,
        })
    }

    /// The scalar game `min_x max_y xy`.
    pub fn xy() -> Self {
        Self::new(DMatrix::from_element(1, 1, 1.0), Domain::FreeSpace, Domain::FreeSpace, 0.0).unwrap()
    }

    /// Matching pennies, `M = [[1, −1], [−1, 1]]` over two simplices: the
    /// entropic counterpart of the xy game with its saddle at the centre.
    pub fn matching_pennies() -> Self {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        Self::new(m, Domain::Simplex, Domain::Simplex, 0.0).unwrap()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.payoff.nrows(), self.payoff.ncols())
    }

    pub fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        let m = self.strong_monotonicity;
        xv.dot(&(&self.payoff * &yv)) + 0.5 * m * (xv.norm_squared() - yv.norm_squared())
    }

    /// Monotone operator `B(x, y) = (My + m·x, −Mᵀx + m·y)`.
    pub fn operator(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        let m = self.strong_monotonicity;
        let gx = &self.payoff * &yv + &xv * m;
        let gy = -(self.payoff.transpose() * &xv) + &yv * m;
        (gx.as_slice().to_vec(), gy.as_slice().to_vec())
    }

    /// `‖M‖₂ + m`.
    pub fn lipschitz(&self) -> f64 {
        spectral_norm(&self.payoff) + self.strong_monotonicity
    }
}

/// Largest singular value by power iteration on `MᵀM` (200 steps, relative
/// tolerance 1e-10).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // deterministic start with every component nonzero
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64);
    v /= v.norm();
    let mut sigma2 = 0.0;
    for _ in 0..200 {
        let w = m.transpose() * (m * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - sigma2).abs() <= 1e-10 * next.abs() {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    sigma2.max(0.0).sqrt()
}

/// Per-iteration step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StepSchedule {
    Constant(f64),
    Sequence(Vec<f64>),
}

impl StepSchedule {
    /// A sequence checked against `[ε, (1 − 2ε)/(2L)]`.
    pub fn bounded(steps: Vec<f64>, epsilon: f64, lipschitz: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(parameter("epsilon must be positive"));
        }
        let upper = (1.0 - 2.0 * epsilon) / (2.0 * lipschitz);
        if let Some((k, eta)) = steps
            .iter()
            .enumerate()
            .find(|(_, &eta)| !(eta >= epsilon && eta <= upper))
        {
            return Err(parameter(format!(
                "step {k} = {eta} outside [{epsilon}, {upper}]"
            )));
        }
        Ok(StepSchedule::Sequence(steps))
    }

    pub fn validate(&self, iterations: usize) -> Result<()> {
        match self {
            StepSchedule::Constant(eta) if *eta > 0.0 && eta.is_finite() => Ok(()),
            StepSchedule::Constant(eta) => Err(parameter(format!("step size must be positive, got {eta}"))),
            StepSchedule::Sequence(steps) => {
                if steps.len() < iterations {
                    return Err(parameter(format!(
                        "schedule has {} steps for {iterations} iterations",
                        steps.len()
                    )));
                }
                match steps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
                    Some(eta) => Err(parameter(format!("step size must be positive, got {eta}"))),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Constant(eta) => *eta,
            StepSchedule::Sequence(steps) => steps[k.min(steps.len() - 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameAlgorithm {
    Gda,
    Ogda,
    Mwu,
    Omwu,
    ExtraGradient,
    PastExtraGradient,
    ReflectedGradient,
    /// Optimistic descent for `x`, plain ascent for `y`.
    SinglyOptimistic,
}

impl GameAlgorithm {
    pub const ALL: [GameAlgorithm; 8] = [
        GameAlgorithm::Gda,
        GameAlgorithm::Ogda,
        GameAlgorithm::Mwu,
        GameAlgorithm::Omwu,
        GameAlgorithm::ExtraGradient,
        GameAlgorithm::PastExtraGradient,
        GameAlgorithm::ReflectedGradient,
        GameAlgorithm::SinglyOptimistic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GameAlgorithm::Gda => "gda",
            GameAlgorithm::Ogda => "ogda",
            GameAlgorithm::Mwu => "mwu",
            GameAlgorithm::Omwu => "omwu",
            GameAlgorithm::ExtraGradient => "eg",
            GameAlgorithm::PastExtraGradient => "peg",
            GameAlgorithm::ReflectedGradient => "rg",
            GameAlgorithm::SinglyOptimistic => "singly",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| parameter(format!("unknown game algorithm `{name}`")))
    }

    fn mirror_map(&self) -> MirrorMap {
        match self {
            GameAlgorithm::Mwu | GameAlgorithm::Omwu => MirrorMap::NegativeEntropy,
            _ => MirrorMap::Euclidean,
        }
    }
}

/// Recorded `(x, y)` trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub iterations: Vec<usize>,
    pub iterates: Vec<(Vec<f64>, Vec<f64>)>,
    pub recorded_every: usize,
    pub diagnostics: Vec<BTreeMap<String, f64>>,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// `‖(x, y)‖` per record.
    pub fn norms(&self) -> Vec<f64> {
        self.iterates
            .iter()
            .map(|(x, y)| x.iter().chain(y).map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    pub fn diagnostic(&self, key: &str) -> Vec<f64> {
        self.diagnostics
            .iter()
            .map(|d| d.get(key).copied().unwrap_or(f64::NAN))
            .collect()
    }
}

/// Whether iteration `k` of a `total`-iteration run is recorded.
pub fn is_recorded(k: usize, stride: usize, total: usize) -> bool {
    k % stride == 0 || k == total
}

struct Recorder {
    trace: IterateTrace,
    stride: usize,
    total: usize,
}

impl Recorder {
    fn new(stride: usize, total: usize) -> Self {
        Self {
            trace: IterateTrace {
                iterations: Vec::new(),
                iterates: Vec::new(),
                recorded_every: stride,
                diagnostics: Vec::new(),
            },
            stride,
            total,
        }
    }

    fn offer(&mut self, k: usize, game: &BilinearGame, x: &[f64], y: &[f64]) {
        if !is_recorded(k, self.stride, self.total) {
            return;
        }
        let mut diag = BTreeMap::new();
        let norm = x.iter().chain(y).map(|v| v * v).sum::<f64>().sqrt();
        diag.insert("norm".to_string(), norm);
        diag.insert("objective".to_string(), game.objective(x, y));
        self.trace.iterations.push(k);
        self.trace.iterates.push((x.to_vec(), y.to_vec()));
        self.trace.diagnostics.push(diag);
    }
}

/// Runs `iters` simultaneous updates of `algo` from `init`, recording every
/// `stride` iterations plus the initial and final points.
pub fn solve_game(
    game: &BilinearGame,
    algo: GameAlgorithm,
    schedule: &StepSchedule,
    init: (&[f64], &[f64]),
    iters: usize,
    stride: usize,
) -> Result<IterateTrace> {
    let (nx, ny) = game.dims();
    if iters == 0 {
        return Err(parameter("need at least one iteration"));
    }
    if stride == 0 {
        return Err(parameter("stride must be positive"));
    }
    schedule.validate(iters)?;
    let (x0, y0) = init;
    if x0.len() != nx || y0.len() != ny {
        return Err(precondition("initial point has the wrong dimension"));
    }
    if !game.x_domain.contains(x0) || !game.y_domain.contains(y0) {
        return Err(precondition("initial point lies outside the game domains"));
    }
    let gx = BregmanGeometry::new(algo.mirror_map(), game.x_domain)?;
    let gy = BregmanGeometry::new(algo.mirror_map(), game.y_domain)?;

    let mut rec = Recorder::new(stride, iters);
    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    rec.offer(0, game, &x, &y);

    // state carried between iterations by the single-call methods
    let mut prev_grad = game.operator(&x, &y);
    let mut prev_point = (x.clone(), y.clone());
    let mut prev_half_grad = prev_grad.clone();

    for k in 0..iters {
        let eta = schedule.at(k);
        let eta_prev = if k == 0 { eta } else { schedule.at(k - 1) };
        let (fx, fy) = game.operator(&x, &y);
        let (nx_, ny_) = match algo {
            GameAlgorithm::Gda | GameAlgorithm::Mwu => (gx.md_step(&x, &fx, eta)?, gy.md_step(&y, &fy, eta)?),
            GameAlgorithm::Ogda | GameAlgorithm::Omwu => {
                let (px, py) = if k == 0 { (&fx, &fy) } else { (&prev_grad.0, &prev_grad.1) };
                (
                    gx.omd_step(&x, &fx, px, eta, eta_prev)?,
                    gy.omd_step(&y, &fy, py, eta, eta_prev)?,
                )
            }
            GameAlgorithm::SinglyOptimistic => {
                let px = if k == 0 { &fx } else { &prev_grad.0 };
                (gx.omd_step(&x, &fx, px, eta, eta_prev)?, gy.md_step(&y, &fy, eta)?)
            }
            GameAlgorithm::ExtraGradient => {
                let hx = gx.md_step(&x, &fx, eta)?;
                let hy = gy.md_step(&y, &fy, eta)?;
                let (hfx, hfy) = game.operator(&hx, &hy);
                (gx.md_step(&x, &hfx, eta)?, gy.md_step(&y, &hfy, eta)?)
            }
            GameAlgorithm::PastExtraGradient => {
                let hx = gx.md_step(&x, &prev_half_grad.0, eta)?;
                let hy = gy.md_step(&y, &prev_half_grad.1, eta)?;
                let (hfx, hfy) = game.operator(&hx, &hy);
                let next = (gx.md_step(&x, &hfx, eta)?, gy.md_step(&y, &hfy, eta)?);
                prev_half_grad = (hfx, hfy);
                next
            }
            GameAlgorithm::ReflectedGradient => {
                let wx: Vec<f64> = x.iter().zip(&prev_point.0).map(|(a, b)| 2.0 * a - b).collect();
                let wy: Vec<f64> = y.iter().zip(&prev_point.1).map(|(a, b)| 2.0 * a - b).collect();
                let (wfx, wfy) = game.operator(&wx, &wy);
                (gx.md_step(&x, &wfx, eta)?, gy.md_step(&y, &wfy, eta)?)
            }
        };
        prev_grad = (fx, fy);
        prev_point = (std::mem::replace(&mut x, nx_), std::mem::replace(&mut y, ny_));
        rec.offer(k + 1, game, &x, &y);
    }
    Ok(rec.trace)
}

/// Running uniform means of a trace: element `k` averages records `0..=k`,
/// the initial point counting as the first iterate.
pub fn average_trace(trace: &IterateTrace) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if trace.is_empty() {
        return Err(precondition("empty trace"));
    }
    if trace.recorded_every != 1 {
        return Err(precondition(format!(
            "averaging needs every iterate (stride 1), trace has stride {}",
            trace.recorded_every
        )));
    }
    let xs: Vec<Vec<f64>> = trace.iterates.iter().map(|(x, _)| x.clone()).collect();
    let ys: Vec<Vec<f64>> = trace.iterates.iter().map(|(_, y)| y.clone()).collect();
    Ok(running_means(&xs).into_iter().zip(running_means(&ys)).collect())
}

/// Running means of a sequence of equal-length vectors.
pub fn running_means(seq: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(seq.len());
    let Some(first) = seq.first() else {
        return out;
    };
    let mut sum = vec![0.0; first.len()];
    for (k, v) in seq.iter().enumerate() {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        let n = (k + 1) as f64;
        out.push(sum.iter().map(|s| s / n).collect());
    }
    out
}
