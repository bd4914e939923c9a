//! Hardy / weighted Bergman space geometry: monomial basis norms,
//! reproducing kernels, Gram quadratic forms of kernel combinations, and the
//! exact adjoint action `C*_{ψ,φ} K_z = conj(ψ(z)) K_{φ(z)}` on kernels.

use crate::mobius::MobiusMap;
use crate::symbol::SymbolSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("Bergman weight parameter must satisfy α > -1, got {0}")]
    InvalidAlpha(f64),
    #[error("kernel K_z(w) is singular: z̄·w too close to 1")]
    KernelSingularity,
    #[error("point lies outside the open unit disk")]
    OutsideDisk,
    #[error("Gram form evaluated significantly below zero: {0:.3e}")]
    NumericallyIndefinite(f64),
}

/// Which reproducing-kernel Hilbert space the computation lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    Hardy,
    Bergman { alpha: f64 },
}

impl SpaceSpec {
    pub fn bergman(alpha: f64) -> Result<Self, SpaceError> {
        if alpha <= -1.0 {
            return Err(SpaceError::InvalidAlpha(alpha));
        }
        Ok(SpaceSpec::Bergman { alpha })
    }

    /// Kernel exponent: `K_z(w) = (1 - z̄w)^{-κ}` with κ = 1 on Hardy and
    /// κ = α + 2 on Bergman(α).
    pub fn kernel_exponent(&self) -> f64 {
        match *self {
            SpaceSpec::Hardy => 1.0,
            SpaceSpec::Bergman { alpha } => alpha + 2.0,
        }
    }

    /// `‖zⁿ‖`: 1 on Hardy, `sqrt(Γ(n+1)Γ(α+2)/Γ(n+α+2))` on Bergman(α).
    pub fn basis_norm(&self, n: usize) -> f64 {
        match *self {
            SpaceSpec::Hardy => 1.0,
            SpaceSpec::Bergman { alpha } => {
                let n = n as f64;
                let log_sq =
                    libm::lgamma(n + 1.0) + libm::lgamma(alpha + 2.0) - libm::lgamma(n + alpha + 2.0);
                (0.5 * log_sq).exp()
            }
        }
    }

    /// Reproducing kernel value `K_z(w)`; principal branch for non-integer
    /// exponents (safe: `1 - z̄w` has positive real part on the disk).
    pub fn kernel_eval(&self, z: Complex64, w: Complex64) -> Result<Complex64, SpaceError> {
        if z.norm() >= 1.0 {
            return Err(SpaceError::OutsideDisk);
        }
        let den = Complex64::new(1.0, 0.0) - z.conj() * w;
        if den.norm() < 1e-12 {
            return Err(SpaceError::KernelSingularity);
        }
        let kappa = self.kernel_exponent();
        Ok((-kappa * den.ln()).exp())
    }

    /// `‖K_z‖ = (1 - |z|²)^{-κ/2}`.
    pub fn kernel_norm(&self, z: Complex64) -> f64 {
        let t = 1.0 - z.norm_sqr();
        t.powf(-self.kernel_exponent() / 2.0)
    }
}

/// A finite combination `Σ c_k K_{w_k}` of reproducing kernels — the witness
/// vectors of the approximate-eigenvector constructions. An empty term list
/// is the zero vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelCombination {
    pub terms: Vec<(Complex64, Complex64)>,
    pub space: SpaceSpec,
}

impl KernelCombination {
    pub fn new(space: SpaceSpec, terms: Vec<(Complex64, Complex64)>) -> Result<Self, SpaceError> {
        if terms.iter().any(|(_, w)| w.norm() >= 1.0) {
            return Err(SpaceError::OutsideDisk);
        }
        Ok(KernelCombination { terms, space })
    }

    /// Pointwise value `Σ c_k K_{w_k}(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, SpaceError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, w) in &self.terms {
            acc += c * self.space.kernel_eval(w, z)?;
        }
        Ok(acc)
    }

    /// Norm via the Gram quadratic form `⟨K_{w_j}, K_{w_k}⟩ = K_{w_j}(w_k)`,
    /// clamped at zero before the square root. The form is positive
    /// semidefinite in exact arithmetic; an evaluation below `-1e-6·scale`
    /// reports [`SpaceError::NumericallyIndefinite`].
    pub fn norm(&self) -> Result<f64, SpaceError> {
        let n = self.terms.len();
        let mut quad = 0.0;
        let mut scale = 0.0;
        for j in 0..n {
            let (cj, wj) = self.terms[j];
            for k in 0..n {
                let (ck, wk) = self.terms[k];
                let gram = self.space.kernel_eval(wj, wk)?;
                let contrib = (cj * ck.conj() * gram).re;
                quad += contrib;
                scale += (cj * ck.conj() * gram).norm();
            }
        }
        if quad < -1e-6 * scale.max(1e-300) {
            return Err(SpaceError::NumericallyIndefinite(quad));
        }
        Ok(quad.max(0.0).sqrt())
    }

    /// Exact adjoint action: each term `(c, w)` maps to
    /// `(c · conj(ψ(w)), φ(w))`. No truncation is involved.
    pub fn adjoint(
        &self,
        symbol: &SymbolSpec,
        map: &MobiusMap,
    ) -> Result<KernelCombination, SpaceError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(c, w) in &self.terms {
            let psi = symbol.evaluate(w).map_err(|_| SpaceError::OutsideDisk)?;
            terms.push((c * psi.conj(), map.apply(w)));
        }
        KernelCombination::new(self.space, terms)
    }

    /// Term-wise difference `self - λ·other` without consolidating points.
    pub fn sub_scaled(&self, lambda: Complex64, other: &KernelCombination) -> KernelCombination {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|&(c, w)| (-lambda * c, w)));
        KernelCombination {
            terms,
            space: self.space,
        }
    }

    /// Coefficients of the combination in the orthonormal monomial basis,
    /// truncated at degree `n - 1`: `K_w = Σ_m (w̄^m / β_m) e_m`.
    pub fn coefficients(&self, n: usize) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for &(c, w) in &self.terms {
            let wc = w.conj();
            let mut pow = Complex64::new(1.0, 0.0);
            for (m, slot) in coeffs.iter_mut().enumerate() {
                *slot += c * pow / self.space.basis_norm(m);
                pow *= wc;
            }
        }
        coeffs
    }
}
