//! Dense complex polynomials in ascending-power coefficient order.
//!
//! Small utility layer shared by the symbol and truncation modules: Horner
//! evaluation, arithmetic, and root finding via companion-matrix eigenvalues
//! with one Newton polish step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("companion-matrix eigensolver did not converge")]
    RootFindingFailure,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
}

/// Evaluate `Σ coeffs[j] z^j` by Horner's rule.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Coefficients of the derivative.
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    if coeffs.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| c * j as f64)
        .collect()
}

pub fn multiply(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Drop trailing coefficients that are negligibly small relative to the
/// largest one. Keeps at least the constant term.
pub fn trim(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = scale * 1e-14;
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1].norm() <= tol {
        end -= 1;
    }
    coeffs[..end].to_vec()
}

/// Degree after trimming (0 for constants).
pub fn degree(coeffs: &[Complex64]) -> usize {
    trim(coeffs).len() - 1
}

/// All roots of the polynomial, as companion-matrix eigenvalues polished by
/// one Newton step, sorted by (modulus, argument) for reproducible reports.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let p = trim(coeffs);
    if p.iter().all(|c| c.norm() == 0.0) {
        return Err(PolyError::ZeroPolynomial);
    }
    let d = p.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = p[d];
    let n = d;
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p[i] / lead;
    }
    let schur = companion
        .try_schur(1e-14, 10_000)
        .ok_or(PolyError::RootFindingFailure)?;
    let (_, t) = schur.unpack();
    let mut rts: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let dp = derivative(&p);
    for r in rts.iter_mut() {
        let slope = eval(&dp, *r);
        if slope.norm() > 1e-30 {
            let step = eval(&p, *r) / slope;
            if step.norm() < 0.1 * (1.0 + r.norm()) {
                *r -= step;
            }
        }
    }
    sort_points(&mut rts);
    Ok(rts)
}

/// Deterministic (modulus, argument) ordering used for all reported point sets.
pub fn sort_points(pts: &mut [Complex64]) {
    pts.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
}
