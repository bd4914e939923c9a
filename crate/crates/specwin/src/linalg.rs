//! Dense complex linear algebra used by the truncation engine: Schur-based
//! eigenvalues, smallest singular values, and operator 2-norms. Thin layer
//! over nalgebra's generic decompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("Schur/eigenvalue iteration did not converge")]
    EigensolverNonconvergence,
}

/// All eigenvalues of a dense complex matrix via its Schur form, sorted by
/// (modulus descending, argument ascending).
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>, LinalgError> {
    let t = schur_triangle(a)?;
    let mut eigs: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    eigs.sort_by(|x, y| {
        y.norm()
            .partial_cmp(&x.norm())
            .unwrap()
            .then(x.arg().partial_cmp(&y.arg()).unwrap())
    });
    Ok(eigs)
}

/// Upper-triangular Schur factor `T` with `A = Q T Q*`. Since σ_min is
/// unitarily invariant, `σ_min(A - λI) = σ_min(T - λI)`, which reduces a
/// pseudospectrum grid to cheap triangular solves.
pub fn schur_triangle(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, LinalgError> {
    let schur = a
        .clone()
        .try_schur(1e-14, 100_000)
        .ok_or(LinalgError::EigensolverNonconvergence)?;
    let (_, t) = schur.unpack();
    Ok(t)
}

/// Smallest singular value by full SVD.
pub fn sigma_min_svd(a: &DMatrix<Complex64>) -> f64 {
    let svd = a.clone().svd(false, false);
    svd.singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// `σ_min(T - λI)` for upper-triangular `T`, by inverse iteration on
/// `(T-λI)⁻¹(T-λI)⁻*`: two triangular solves per step, `O(n²)` each.
pub fn sigma_min_shifted_triangular(t: &DMatrix<Complex64>, lambda: Complex64) -> f64 {
    let n = t.nrows();
    // Exact eigenvalue hit: the shifted triangle is singular.
    let min_diag = (0..n)
        .map(|i| (t[(i, i)] - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    if min_diag < 1e-300 {
        return 0.0;
    }
    let mut v = DVector::<Complex64>::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.7).sin() * 0.1, (i as f64 * 1.3).cos() * 0.1)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut inv_sigma_sq = 0.0f64;
    for iter in 0..60 {
        // w = (T-λ)^{-*} v, u = (T-λ)^{-1} w
        let w = solve_lower_adjoint(t, lambda, &v);
        let u = solve_upper(t, lambda, &w);
        let growth = u.norm();
        if !growth.is_finite() || growth == 0.0 {
            return 0.0;
        }
        let next = growth;
        let rel = (next - inv_sigma_sq).abs() / next;
        inv_sigma_sq = next;
        v = u / Complex64::new(growth, 0.0);
        if iter >= 3 && rel < 1e-8 {
            break;
        }
    }
    inv_sigma_sq.powf(-0.5)
}

/// Solve `(T - λI) x = b` by back substitution.
fn solve_upper(
    t: &DMatrix<Complex64>,
    lambda: Complex64,
    b: &DVector<Complex64>,
) -> DVector<Complex64> {
    let n = t.nrows();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= t[(i, j)] * x[j];
        }
        x[i] = acc / (t[(i, i)] - lambda);
    }
    x
}

/// Solve `(T - λI)* x = b`; the adjoint of an upper triangle is lower
/// triangular, so this is forward substitution.
fn solve_lower_adjoint(
    t: &DMatrix<Complex64>,
    lambda: Complex64,
    b: &DVector<Complex64>,
) -> DVector<Complex64> {
    let n = t.nrows();
    let mut x = b.clone();
    for i in 0..n {
        let mut acc = x[i];
        for j in 0..i {
            acc -= t[(j, i)].conj() * x[j];
        }
        x[i] = acc / (t[(i, i)] - lambda).conj();
    }
    x
}

/// Operator 2-norm (largest singular value) by power iteration on `A*A`.
pub fn two_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::<Complex64>::from_fn(n, |i, _| {
        Complex64::new(((i + 1) as f64 * 0.37).sin() + 1.0, ((i + 2) as f64 * 0.53).cos())
    });
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    v /= Complex64::new(norm, 0.0);
    let mut sigma_sq = 0.0f64;
    for iter in 0..200 {
        let w = a * &v;
        let u = a.adjoint() * w;
        let growth = u.norm();
        if growth == 0.0 {
            return 0.0;
        }
        let rel = (growth - sigma_sq).abs() / growth;
        sigma_sq = growth;
        v = u / Complex64::new(growth, 0.0);
        if iter >= 5 && rel < 1e-12 {
            break;
        }
    }
    sigma_sq.sqrt()
}
