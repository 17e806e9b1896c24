//! Linear stability of the singly-optimistic dynamics on `min_x max_y xy`.

use nalgebra::{Matrix3, Schur};

use crate::error::{parameter, Result};

/// Jacobian of `(x, y, y_prev) ↦ (x − 2ηy + ηy_prev, y + ηx, y)`.
pub fn singly_optimistic_jacobian(eta: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, -2.0 * eta, eta, eta, 1.0, 0.0, 0.0, 1.0, 0.0)
}

/// Roots of the characteristic cubic `−λ³ + 2λ² − (2η² + 1)λ + η² = 0` as
/// `(re, im)` pairs, from the eigenvalues of its companion matrix.
pub fn singly_optimistic_eigenvalues(eta: f64) -> Result<Vec<(f64, f64)>> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(parameter(format!("eta must be nonnegative, got {eta}")));
    }
    let e2 = eta * eta;
    // monic form λ³ − 2λ² + (2η² + 1)λ − η²
    let companion = Matrix3::new(2.0, -(2.0 * e2 + 1.0), e2, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let schur = Schur::try_new(companion, 1e-12, 10_000)
        .ok_or_else(|| crate::error::Error::Numerical("shifted QR did not converge".into()))?;
    let (a2, a1, a0) = (-2.0, 2.0 * e2 + 1.0, -e2);
    // The pair near 1 is a double root at η = 0 and only good to √ε straight
    // out of QR. Polish the smallest real root, deflate, and solve the
    // remaining quadratic directly.
    let mut r = schur
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or_else(|| crate::error::Error::Numerical("cubic has no real eigenvalue".into()))?;
    for _ in 0..100 {
        let f = ((r + a2) * r + a1) * r + a0;
        let df = (3.0 * r + 2.0 * a2) * r + a1;
        if df == 0.0 {
            break;
        }
        let step = f / df;
        r -= step;
        if step.abs() <= f64::EPSILON * r.abs() {
            break;
        }
    }
    let p = a2 + r;
    let s = a1 + r * p;
    let disc = p * p - 4.0 * s;
    let mut roots = vec![(r, 0.0)];
    if disc >= 0.0 {
        let big = -0.5 * (p + p.signum() * disc.sqrt());
        roots.push((big, 0.0));
        roots.push((if big != 0.0 { s / big } else { 0.0 }, 0.0));
    } else {
        let im = 0.5 * (-disc).sqrt();
        roots.push((-0.5 * p, im));
        roots.push((-0.5 * p, -im));
    }
    Ok(roots)
}

/// `ρ(J)`, the largest eigenvalue modulus of the singly-optimistic Jacobian.
pub fn singly_optimistic_spectral_radius(eta: f64) -> Result<f64> {
    Ok(singly_optimistic_eigenvalues(eta)?
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .fold(0.0, f64::max))
}
