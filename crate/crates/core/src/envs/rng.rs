//! SplitMix64, the generator behind every seeded construction in the crate.
//!
//! State update `s ← s + 0x9E3779B97F4A7C15`, output
//! `z = (s ⊕ (s ≫ 30))·0xBF58476D1CE4E5B9`, `z = (z ⊕ (z ≫ 27))·0x94D049BB133111EB`,
//! `z ⊕ (z ≫ 31)` (all arithmetic mod 2⁶⁴). Uniform doubles take the top 53
//! bits. This is fixed: changing it changes every seeded instance.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard exponential, `−ln U` with `U` on `(0, 1]`.
    pub fn next_exponential(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    /// Flat Dirichlet draw of dimension `n`.
    pub fn dirichlet(&mut self, n: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..n).map(|_| self.next_exponential()).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
        } else {
            w = vec![1.0 / n as f64; n];
        }
        w
    }
}

/// Rescales a probability vector so it sums to one to the last bit that
/// summation allows, by pushing the rounding residue onto the largest entry.
pub(crate) fn renormalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let residue = 1.0 - p.iter().sum::<f64>();
    if let Some(big) = p.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *big += residue;
    }
}
