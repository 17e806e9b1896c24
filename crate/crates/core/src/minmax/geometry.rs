//! Mirror maps, their Bregman divergences and the generalized projection steps
//! built on them.

use serde::{Deserialize, Serialize};

use crate::error::{parameter, precondition, Error, Result};

/// Domain membership is checked with this slack so that iterates produced by
/// floating-point updates are still accepted.
const DOMAIN_TOL: f64 = 1e-9;

/// Mirror map generating the divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MirrorMap {
    /// `Ω(u) = ½‖u‖²`, divergence `½‖u − v‖²`.
    Euclidean,
    /// `Ω(u) = Σ uᵢ log uᵢ`, divergence `KL[u ‖ v]` on the simplex.
    NegativeEntropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    FreeSpace,
    Simplex,
    NonnegativeOrthant,
    Box { lo: f64, hi: f64 },
}

impl Domain {
    pub fn contains(&self, u: &[f64]) -> bool {
        match *self {
            Domain::FreeSpace => u.iter().all(|x| x.is_finite()),
            Domain::Simplex => {
                !u.is_empty()
                    && u.iter().all(|&x| x.is_finite() && x >= -DOMAIN_TOL)
                    && (u.iter().sum::<f64>() - 1.0).abs() <= DOMAIN_TOL
            }
            Domain::NonnegativeOrthant => u.iter().all(|&x| x.is_finite() && x >= -DOMAIN_TOL),
            Domain::Box { lo, hi } => u
                .iter()
                .all(|&x| x.is_finite() && x >= lo - DOMAIN_TOL && x <= hi + DOMAIN_TOL),
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        match *self {
            Domain::FreeSpace => z.to_vec(),
            Domain::NonnegativeOrthant => z.iter().map(|&x| x.max(0.0)).collect(),
            Domain::Box { lo, hi } => z.iter().map(|&x| x.clamp(lo, hi)).collect(),
            Domain::Simplex => project_simplex(z),
        }
    }
}

/// Sort-based Euclidean projection onto the probability simplex.
pub fn project_simplex(z: &[f64]) -> Vec<f64> {
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (i as f64 + 1.0);
        if s - candidate > 0.0 {
            shift = candidate;
        }
    }
    let mut out: Vec<f64> = z.iter().map(|&x| (x - shift).max(0.0)).collect();
    // renormalize away the rounding left by the cumulative sum
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|x| *x /= total);
    }
    out
}

/// A mirror map paired with the convex set it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BregmanGeometry {
    pub kind: MirrorMap,
    pub domain: Domain,
}

impl BregmanGeometry {
    pub fn new(kind: MirrorMap, domain: Domain) -> Result<Self> {
        if kind == MirrorMap::NegativeEntropy && domain != Domain::Simplex {
            return Err(parameter(
                "negative entropy is only supported on the simplex domain",
            ));
        }
        if let Domain::Box { lo, hi } = domain {
            if !(lo <= hi) {
                return Err(parameter(format!("empty box [{lo}, {hi}]")));
            }
        }
        Ok(Self { kind, domain })
    }

    pub fn euclidean(domain: Domain) -> Self {
        Self {
            kind: MirrorMap::Euclidean,
            domain,
        }
    }

    pub fn entropic_simplex() -> Self {
        Self {
            kind: MirrorMap::NegativeEntropy,
            domain: Domain::Simplex,
        }
    }

    fn check_member(&self, u: &[f64], what: &str) -> Result<()> {
        if self.domain.contains(u) {
            Ok(())
        } else {
            Err(precondition(format!("{what} is outside the {:?} domain", self.domain)))
        }
    }

    /// `Ω(u)`.
    pub fn potential(&self, u: &[f64]) -> f64 {
        match self.kind {
            MirrorMap::Euclidean => 0.5 * u.iter().map(|x| x * x).sum::<f64>(),
            MirrorMap::NegativeEntropy => u.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum(),
        }
    }

    /// `∇Ω(u)`; infinite where the entropy gradient is singular.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        match self.kind {
            MirrorMap::Euclidean => u.to_vec(),
            MirrorMap::NegativeEntropy => u.iter().map(|&x| x.ln() + 1.0).collect(),
        }
    }

    /// `D_Ω(u; v) = Ω(u) − Ω(v) − ⟨∇Ω(v), u − v⟩`.
    pub fn divergence(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(precondition("dimension mismatch"));
        }
        self.check_member(u, "u")?;
        self.check_member(v, "v")?;
        match self.kind {
            MirrorMap::Euclidean => Ok(0.5
                * u.iter()
                    .zip(v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()),
            MirrorMap::NegativeEntropy => {
                if let Some(i) = v.iter().position(|&x| x <= 0.0) {
                    return Err(Error::Singularity(format!(
                        "entropy gradient is unbounded at v[{i}] = {}",
                        v[i]
                    )));
                }
                // The simplex form Σ u log(u/v) drops the Σ(v − u) term, which
                // vanishes there; keep it so tolerance-level mass drift cannot
                // make the value negative.
                let kl: f64 = u
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() - a + b } else { b })
                    .sum();
                Ok(kl.max(0.0))
            }
        }
    }

    /// Mirror-descent step: `argmin_{x' ∈ domain} ⟨grad, x'⟩ + D_Ω(x'; x)/eta`.
    pub fn md_step(&self, x: &[f64], grad: &[f64], eta: f64) -> Result<Vec<f64>> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(parameter(format!("step size must be positive, got {eta}")));
        }
        if grad.len() != x.len() {
            return Err(precondition("gradient dimension mismatch"));
        }
        self.check_member(x, "x")?;
        let scaled: Vec<f64> = grad.iter().map(|g| eta * g).collect();
        Ok(self.apply_proto_resolvent(x, &scaled))
    }

    /// Euclidean mirror step over a caller-supplied convex set.
    pub fn md_step_with_projection<P>(&self, x: &[f64], grad: &[f64], eta: f64, project: P) -> Result<Vec<f64>>
    where
        P: FnOnce(&[f64]) -> Result<Vec<f64>>,
    {
        if self.kind != MirrorMap::Euclidean {
            return Err(parameter("custom projections require the Euclidean mirror map"));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(parameter(format!("step size must be positive, got {eta}")));
        }
        if grad.len() != x.len() {
            return Err(precondition("gradient dimension mismatch"));
        }
        let z: Vec<f64> = x.iter().zip(grad).map(|(a, g)| a - eta * g).collect();
        project(&z)
    }

    /// Forward-reflected-backward step: the mirror step driven by
    /// `eta_cur·g_cur + eta_prev·(g_cur − g_prev)`. With equal step sizes this
    /// is the optimistic `2g_cur − g_prev` rule.
    pub fn omd_step(
        &self,
        x: &[f64],
        grad_cur: &[f64],
        grad_prev: &[f64],
        eta_cur: f64,
        eta_prev: f64,
    ) -> Result<Vec<f64>> {
        for eta in [eta_cur, eta_prev] {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(parameter(format!("step size must be positive, got {eta}")));
            }
        }
        if grad_cur.len() != x.len() || grad_prev.len() != x.len() {
            return Err(precondition("gradient dimension mismatch"));
        }
        if grad_cur.iter().chain(grad_prev).any(|g| !g.is_finite()) {
            return Err(precondition("gradients must be finite"));
        }
        self.check_member(x, "x")?;
        let effective: Vec<f64> = grad_cur
            .iter()
            .zip(grad_prev)
            .map(|(&g, &gp)| eta_cur * g + eta_prev * (g - gp))
            .collect();
        Ok(self.apply_proto_resolvent(x, &effective))
    }

    /// `(∇Ω + N_domain)^{-1}(∇Ω(x) − step)` in closed form.
    fn apply_proto_resolvent(&self, x: &[f64], step: &[f64]) -> Vec<f64> {
        match self.kind {
            MirrorMap::Euclidean => {
                let z: Vec<f64> = x.iter().zip(step).map(|(a, s)| a - s).collect();
                self.domain.project(&z)
            }
            MirrorMap::NegativeEntropy => {
                let logits: Vec<f64> = x
                    .iter()
                    .zip(step)
                    .map(|(&a, &s)| if a > 0.0 { a.ln() - s } else { f64::NEG_INFINITY })
                    .collect();
                softmax(&logits)
            }
        }
    }
}

/// Max-shifted softmax; `-inf` logits map to exact zeros.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        let n = logits.len() as f64;
        return vec![1.0 / n; logits.len()];
    }
    let mut out: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}
