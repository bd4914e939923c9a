//! Finite compressions of `C_{ψ,φ}` in the orthonormal monomial basis
//! `e_n = zⁿ/β_n`: the matrix, its eigenvalues, pseudospectrum fields and
//! power-norm spectral radius diagnostics.
//!
//! Column `n` holds the Taylor coefficients of `ψ·φⁿ`, extracted by the
//! discrete Cauchy integral: sample on a circle of radius `ρ`, DFT, divide
//! by `ρ^m`. Each build is certified by doubling the sample count until the
//! entries stabilize.
//!
//! Compression caveat: eigenvalues of compressions of non-normal operators
//! may pollute or omit. Truncation output is treated as evidence throughout;
//! the witness module is the authority.

use crate::linalg;
use crate::mobius::MobiusMap;
use crate::space::SpaceSpec;
use crate::symbol::SymbolSpec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default sampling radius for coefficient extraction.
pub const DEFAULT_RHO: f64 = 0.95;
/// Doubling certification threshold on entry changes.
const STABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TruncationError {
    #[error("coefficient extraction unstable: entry change {0:.3e} after escalation")]
    CoefficientExtractionUnstable(f64),
    #[error(transparent)]
    Eigensolver(#[from] linalg::LinalgError),
    #[error("pseudospectrum grid resolution exceeds 512x512")]
    GridTooFine,
    #[error("power-norm sequence capped at 512 steps, asked for {0}")]
    TooManyPowers(usize),
}

/// Rectangular λ-plane grid for pseudospectrum fields.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Square grid centered on the origin covering radius `r + 0.2`.
    pub fn around_radius(r: f64, n: usize) -> Self {
        let half = r + 0.2;
        GridSpec {
            re_min: -half,
            re_max: half,
            im_min: -half,
            im_max: half,
            nx: n,
            ny: n,
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            let im = if self.ny == 1 {
                self.im_min
            } else {
                self.im_min + (self.im_max - self.im_min) * iy as f64 / (self.ny - 1) as f64
            };
            for ix in 0..self.nx {
                let re = if self.nx == 1 {
                    self.re_min
                } else {
                    self.re_min + (self.re_max - self.re_min) * ix as f64 / (self.nx - 1) as f64
                };
                pts.push(Complex64::new(re, im));
            }
        }
        pts
    }
}

/// `N×N` compression of `C_{ψ,φ}` with its build metadata.
#[derive(Debug, Clone)]
pub struct TruncationMatrix {
    entries: DMatrix<Complex64>,
    dimension: usize,
    symbol: SymbolSpec,
    map: MobiusMap,
    space: SpaceSpec,
    rho: f64,
    samples: usize,
    observed_change: f64,
    certified: bool,
}

impl TruncationMatrix {
    /// Build with the default sampling radius [`DEFAULT_RHO`].
    pub fn build(
        symbol: &SymbolSpec,
        map: &MobiusMap,
        space: SpaceSpec,
        n: usize,
    ) -> Result<Self, TruncationError> {
        Self::build_with_rho(symbol, map, space, n, DEFAULT_RHO)
    }

    /// Build sampling on the circle of radius `rho`. The doubling check
    /// runs at `M`, `2M` and once more at `4M`; if the entries still move
    /// by more than 1e-9 the matrix is returned uncertified with the
    /// observed change recorded (strict callers use [`Self::build_strict`]).
    pub fn build_with_rho(
        symbol: &SymbolSpec,
        map: &MobiusMap,
        space: SpaceSpec,
        n: usize,
        rho: f64,
    ) -> Result<Self, TruncationError> {
        assert!(n >= 1, "truncation dimension must be at least 1");
        assert!(rho > 0.0 && rho <= 1.0, "sampling radius must lie in (0, 1]");
        let m0 = (4 * n).max(1024);
        let mut prev = extract_entries(symbol, map, space, n, rho, m0);
        let mut samples = m0;
        let mut change = f64::INFINITY;
        for escalation in 1..=2 {
            let m = m0 << escalation;
            let next = extract_entries(symbol, map, space, n, rho, m);
            change = max_entry_change(&prev, &next);
            prev = next;
            samples = m;
            if change < STABILITY_TOL {
                break;
            }
        }
        Ok(TruncationMatrix {
            entries: prev,
            dimension: n,
            symbol: symbol.clone(),
            map: *map,
            space,
            rho,
            samples,
            observed_change: change,
            certified: change < STABILITY_TOL,
        })
    }

    /// Like [`Self::build_with_rho`] but an uncertified extraction is a hard
    /// error carrying the observed change.
    pub fn build_strict(
        symbol: &SymbolSpec,
        map: &MobiusMap,
        space: SpaceSpec,
        n: usize,
        rho: f64,
    ) -> Result<Self, TruncationError> {
        let t = Self::build_with_rho(symbol, map, space, n, rho)?;
        if !t.certified {
            return Err(TruncationError::CoefficientExtractionUnstable(
                t.observed_change,
            ));
        }
        Ok(t)
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }
    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn symbol(&self) -> &SymbolSpec {
        &self.symbol
    }
    pub fn map(&self) -> &MobiusMap {
        &self.map
    }
    pub fn space(&self) -> SpaceSpec {
        self.space
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn samples(&self) -> usize {
        self.samples
    }
    pub fn observed_change(&self) -> f64 {
        self.observed_change
    }
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// All eigenvalues, sorted by (modulus descending, argument).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, TruncationError> {
        Ok(linalg::eigenvalues(&self.entries)?)
    }

    /// `σ_min(A - λI)` over the grid, row-major `ny × nx`. Uses one Schur
    /// reduction and triangular inverse iteration per grid point; points are
    /// evaluated in parallel.
    pub fn pseudospectrum_grid(&self, grid: &GridSpec) -> Result<Vec<f64>, TruncationError> {
        if grid.nx > 512 || grid.ny > 512 {
            return Err(TruncationError::GridTooFine);
        }
        let t = linalg::schur_triangle(&self.entries)?;
        Ok(grid
            .points()
            .par_iter()
            .map(|&lambda| linalg::sigma_min_shifted_triangular(&t, lambda))
            .collect())
    }

    /// `σ_min(A - λI)` at a single point.
    pub fn sigma_min_at(&self, lambda: Complex64) -> f64 {
        let mut shifted = self.entries.clone();
        for i in 0..self.dimension {
            shifted[(i, i)] -= lambda;
        }
        linalg::sigma_min_svd(&shifted)
    }

    /// The sequence `‖Aⁿ‖^{1/n}`, n = 1..=n_max, with pre-scaling so that
    /// hyperbolic norm growth cannot overflow.
    pub fn norm_power_radius(&self, n_max: usize) -> Result<Vec<f64>, TruncationError> {
        if n_max > 512 {
            return Err(TruncationError::TooManyPowers(n_max));
        }
        let mut out = Vec::with_capacity(n_max);
        let mut log_norm_acc = 0.0f64;
        let mut scaled = self.entries.clone();
        for n in 1..=n_max {
            let norm = linalg::two_norm(&scaled);
            if norm == 0.0 {
                // nilpotent from here on
                for _ in n..=n_max {
                    out.push(0.0);
                }
                break;
            }
            log_norm_acc += norm.ln();
            out.push((log_norm_acc / n as f64).exp());
            scaled /= Complex64::new(norm, 0.0);
            if n < n_max {
                scaled = &scaled * &self.entries;
            }
        }
        Ok(out)
    }

    /// Apply `A*` to the coefficient expansion of `K_z` and compare with the
    /// expansion of `conj(ψ(z)) K_{φ(z)}`; returns the relative ℓ² error.
    /// This ties the matrix engine to the exact adjoint identity.
    pub fn adjoint_consistency_error(&self, z: Complex64) -> f64 {
        use crate::space::KernelCombination;
        let n = self.dimension;
        let kz = KernelCombination::new(self.space, vec![(Complex64::new(1.0, 0.0), z)])
            .expect("kernel point inside the disk");
        let v = nalgebra::DVector::from_vec(kz.coefficients(n));
        let got = self.entries.adjoint() * v;
        let psi = self.symbol.evaluate(z).expect("symbol evaluable inside the disk");
        let target_combo = KernelCombination::new(
            self.space,
            vec![(psi.conj(), self.map.apply(z))],
        )
        .expect("image point inside the disk");
        let target = nalgebra::DVector::from_vec(target_combo.coefficients(n));
        let denom = target.norm().max(1e-300);
        (got - target).norm() / denom
    }
}

fn extract_entries(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    n: usize,
    rho: f64,
    m: usize,
) -> DMatrix<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    // Sample ψ and φ once on the circle of radius rho.
    let mut psi_vals = Vec::with_capacity(m);
    let mut phi_vals = Vec::with_capacity(m);
    for j in 0..m {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let z = Complex64::from_polar(rho, theta);
        psi_vals.push(symbol.evaluate(z).unwrap_or(Complex64::new(0.0, 0.0)));
        phi_vals.push(map.apply(z));
    }
    let beta: Vec<f64> = (0..n).map(|k| space.basis_norm(k)).collect();
    let inv_rho_pow: Vec<f64> = (0..n)
        .scan(1.0f64, |acc, _| {
            let v = *acc;
            *acc /= rho;
            Some(v)
        })
        .collect();

    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut pow: Vec<Complex64> = psi_vals.clone(); // ψ·φ⁰ at the samples
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for col in 0..n {
        buf.copy_from_slice(&pow);
        fft.process(&mut buf);
        for row in 0..n {
            let coeff = buf[row] / m as f64 * inv_rho_pow[row];
            a[(row, col)] = coeff * beta[row] / beta[col];
        }
        if col + 1 < n {
            for (p, phi) in pow.iter_mut().zip(phi_vals.iter()) {
                *p *= phi;
            }
        }
    }
    a
}

fn max_entry_change(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
