//! The weight `ψ` as a rational function times a finite Blaschke product,
//! with its zero set, invertibility criterion, level-circle function
//! `Δ_ψ(r)`, outer-part modulus, iteration cocycle `ψ_(n)` and Birkhoff
//! averages along rotation orbits.
//!
//! The class is closed under products and pre-composition with disk
//! automorphisms, has an exact zero set, and makes Jensen's formula exact —
//! which is what the cross-validation layers lean on.

use crate::mobius::{Kind, MobiusMap};
use crate::poly;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Required modulus margin of denominator roots beyond the closed disk.
const DENOMINATOR_MARGIN: f64 = 1e-9;
/// Default bucket tolerance for boundary zeros.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Quadrature node doubling starts here …
const QUAD_START: usize = 256;
/// … and refuses to go beyond this.
const QUAD_CAP: usize = 1 << 20;
/// Node doubling stops once successive values agree to this.
const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("denominator has a root at modulus {0:.6} inside or near the closed unit disk")]
    DenominatorRootInDisk(f64),
    #[error("weight is identically zero")]
    ZeroSymbol,
    #[error("Blaschke zero lies outside the open unit disk")]
    BlaschkeZeroOutsideDisk,
    #[error("evaluation point lies outside the closed unit disk")]
    OutsideClosedDisk,
    #[error("polynomial root finding failed")]
    RootFindingFailure,
    #[error("circle quadrature did not stabilize: last change {0:.3e}")]
    QuadratureNonConvergence(f64),
    #[error("radius must lie in [0, 1]")]
    BadRadius,
    #[error("weight vanishes on the sampled orbit")]
    ZeroOnOrbit,
    #[error("map must be an irrational rotation about the origin")]
    NotIrrationalRotation,
    #[error("zero-report tolerance must lie in (0, 1e-3]")]
    BadTolerance,
}

/// Weight `ψ(z) = B(z) · p(z)/q(z)` with `B` the finite Blaschke product
/// over `blaschke` and `p`, `q` polynomials in ascending coefficient order.
/// `q` has no roots in the closed disk and `p` is not identically zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolSpec {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    blaschke: Vec<Complex64>,
}

/// Zeros of `ψ` bucketed by modulus, plus the inner radius
/// `R = inf{|z| : ψ(z) = 0, z ∈ D}` (`+∞` when `ψ` has no zero in `D`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroReport {
    pub zeros_inside: Vec<Complex64>,
    pub zeros_boundary: Vec<Complex64>,
    pub min_inner_radius: f64,
}

impl SymbolSpec {
    pub fn new(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        blaschke: Vec<Complex64>,
    ) -> Result<Self, SymbolError> {
        let num = poly::trim(&num);
        let den = poly::trim(&den);
        if num.iter().all(|c| c.norm() == 0.0) {
            return Err(SymbolError::ZeroSymbol);
        }
        if den.iter().all(|c| c.norm() == 0.0) {
            return Err(SymbolError::DenominatorRootInDisk(0.0));
        }
        let den_roots = poly::roots(&den).map_err(|_| SymbolError::RootFindingFailure)?;
        for r in &den_roots {
            if r.norm() <= 1.0 + DENOMINATOR_MARGIN {
                return Err(SymbolError::DenominatorRootInDisk(r.norm()));
            }
        }
        if blaschke.iter().any(|b| b.norm() >= 1.0) {
            return Err(SymbolError::BlaschkeZeroOutsideDisk);
        }
        Ok(SymbolSpec { num, den, blaschke })
    }

    /// Polynomial weight `ψ = p` (denominator 1, no Blaschke factor).
    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self, SymbolError> {
        SymbolSpec::new(coeffs.to_vec(), vec![Complex64::new(1.0, 0.0)], Vec::new())
    }

    pub fn constant(c: Complex64) -> Result<Self, SymbolError> {
        SymbolSpec::polynomial(&[c])
    }

    pub fn num(&self) -> &[Complex64] {
        &self.num
    }
    pub fn den(&self) -> &[Complex64] {
        &self.den
    }
    pub fn blaschke(&self) -> &[Complex64] {
        &self.blaschke
    }

    /// `ψ(z)` on the closed disk; Blaschke factors as `(z - z₀)/(1 - z̄₀ z)`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, SymbolError> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(SymbolError::OutsideClosedDisk);
        }
        let mut v = poly::eval(&self.num, z) / poly::eval(&self.den, z);
        for &b in &self.blaschke {
            v *= (z - b) / (Complex64::new(1.0, 0.0) - b.conj() * z);
        }
        Ok(v)
    }

    /// Numerator roots plus Blaschke zeros, bucketed by modulus with the
    /// given boundary tolerance and ordered by (modulus, argument).
    pub fn zero_report(&self, tol: f64) -> Result<ZeroReport, SymbolError> {
        if !(tol > 0.0 && tol <= 1e-3) {
            return Err(SymbolError::BadTolerance);
        }
        let mut zeros = poly::roots(&self.num).map_err(|_| SymbolError::RootFindingFailure)?;
        zeros.extend_from_slice(&self.blaschke);
        poly::sort_points(&mut zeros);
        let mut inside = Vec::new();
        let mut boundary = Vec::new();
        for z in zeros {
            let m = z.norm();
            if (m - 1.0).abs() <= tol {
                boundary.push(z);
            } else if m < 1.0 {
                inside.push(z);
            }
        }
        let min_inner_radius = inside
            .first()
            .map(|z| z.norm())
            .unwrap_or(f64::INFINITY);
        Ok(ZeroReport {
            zeros_inside: inside,
            zeros_boundary: boundary,
            min_inner_radius,
        })
    }

    /// True iff `1/ψ ∈ H^∞`: no zeros in the closed unit disk and no
    /// Blaschke factor.
    pub fn is_invertible_weight(&self) -> bool {
        if !self.blaschke.is_empty() {
            return false;
        }
        match poly::roots(&self.num) {
            Ok(roots) => roots.iter().all(|r| r.norm() > 1.0 + BOUNDARY_TOL),
            Err(_) => false,
        }
    }

    /// All zeros of `ψ` (numerator roots in the closed disk plus Blaschke
    /// zeros), with multiplicity, unordered buckets aside.
    fn all_zeros(&self) -> Result<Vec<Complex64>, SymbolError> {
        let mut zeros = poly::roots(&self.num).map_err(|_| SymbolError::RootFindingFailure)?;
        zeros.extend_from_slice(&self.blaschke);
        Ok(zeros)
    }

    /// `Δ_ψ(r) = exp((1/2π) ∫ log|ψ(re^{iθ})| dθ)` by trapezoid quadrature
    /// on the circle, with node doubling until 1e-8 stability. `Δ_ψ(0)`
    /// is `|ψ(0)|`. A zero sitting exactly on the radius-`r` circle routes
    /// the computation through [`SymbolSpec::jensen_delta`] instead.
    pub fn delta_psi(&self, r: f64) -> Result<f64, SymbolError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(SymbolError::BadRadius);
        }
        if r == 0.0 {
            return Ok(self.evaluate(Complex64::new(0.0, 0.0))?.norm());
        }
        let zeros = self.all_zeros()?;
        if zeros.iter().any(|z| (z.norm() - r).abs() < 1e-12) {
            return self.jensen_delta(r);
        }
        let integrand = |theta: f64| {
            let z = Complex64::from_polar(r, theta);
            let v = self.evaluate(z).map(|v| v.norm()).unwrap_or(0.0);
            v.max(1e-300).ln()
        };
        let mean = circle_mean(&integrand)?;
        Ok(mean.exp())
    }

    /// Analytic evaluation of `Δ_ψ(r)` by Jensen's formula:
    /// `exp(log|ψ̃(0)| + Σ_{|z_k| < r} log(r/|z_k|)) · r^m` where `m` is the
    /// order of the zero at the origin and `ψ̃ = ψ/z^m`.
    pub fn jensen_delta(&self, r: f64) -> Result<f64, SymbolError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(SymbolError::BadRadius);
        }
        let num_roots = poly::roots(&self.num).map_err(|_| SymbolError::RootFindingFailure)?;
        let lead = *poly::trim(&self.num).last().unwrap();
        let origin_tol = 1e-12;

        // |ψ̃(0)|: leading coefficient times the moduli of all nonzero roots
        // (numerator and Blaschke), over |q(0)|.
        let mut log_base = lead.norm().ln();
        let mut origin_order = 0u32;
        for root in num_roots.iter().chain(self.blaschke.iter()) {
            if root.norm() <= origin_tol {
                origin_order += 1;
            } else {
                log_base += root.norm().ln();
            }
        }
        log_base -= poly::eval(&self.den, Complex64::new(0.0, 0.0)).norm().ln();

        if r == 0.0 {
            return Ok(if origin_order > 0 { 0.0 } else { log_base.exp() });
        }
        let mut log_val = log_base + origin_order as f64 * r.ln();
        for root in num_roots.iter().chain(self.blaschke.iter()) {
            let m = root.norm();
            if m > origin_tol && m < r {
                log_val += (r / m).ln();
            }
        }
        Ok(log_val.exp())
    }

    /// Outer-part modulus `|v(a)| = exp(P[log|ψ|](a))`, the Poisson integral
    /// at `a` of the boundary values of `log|ψ|`. Boundary zeros are split
    /// off analytically (`P[log|e^{iθ} - ζ|](a) = log|a - ζ|`), so the
    /// quadrature only ever sees a smooth integrand.
    pub fn outer_modulus_at(&self, a: Complex64) -> Result<f64, SymbolError> {
        if a.norm() >= 1.0 {
            return Err(SymbolError::OutsideClosedDisk);
        }
        let num_roots = poly::roots(&self.num).map_err(|_| SymbolError::RootFindingFailure)?;
        let boundary: Vec<Complex64> = num_roots
            .iter()
            .filter(|z| (z.norm() - 1.0).abs() <= BOUNDARY_TOL)
            .map(|z| z / z.norm())
            .collect();

        // Deflate the boundary roots out of the numerator.
        let mut deflated = poly::trim(&self.num);
        for zeta in &boundary {
            deflated = deflate(&deflated, *zeta);
        }

        let blaschke = self.blaschke.clone();
        let den = self.den.clone();
        let pr = 1.0 - a.norm_sqr();
        let integrand = move |theta: f64| {
            let z = Complex64::from_polar(1.0, theta);
            let mut v = poly::eval(&deflated, z) / poly::eval(&den, z);
            for &b in &blaschke {
                v *= (z - b) / (Complex64::new(1.0, 0.0) - b.conj() * z);
            }
            let poisson = pr / (z - a).norm_sqr();
            poisson * v.norm().max(1e-300).ln()
        };
        let mut log_val = circle_mean(&integrand)?;
        for zeta in &boundary {
            log_val += (a - zeta).norm().ln();
        }
        Ok(log_val.exp())
    }

    /// Iteration cocycle `ψ_(n)(z) = Π_{k=0}^{n-1} ψ(φ_k(z))`; `ψ_(0) = 1`.
    pub fn cocycle(
        &self,
        map: &MobiusMap,
        n: u64,
        z: Complex64,
    ) -> Result<Complex64, SymbolError> {
        let (log_mod, arg) = self.cocycle_log(map, n, z)?;
        if log_mod == f64::NEG_INFINITY {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(Complex64::from_polar(log_mod.exp(), arg))
    }

    /// Log-space cocycle accumulation `(Σ log|ψ∘φ_k|, Σ arg ψ∘φ_k)`, immune
    /// to overflow for large `n`. A zero factor yields `-∞` log-modulus.
    pub fn cocycle_log(
        &self,
        map: &MobiusMap,
        n: u64,
        z: Complex64,
    ) -> Result<(f64, f64), SymbolError> {
        let mut log_mod = 0.0f64;
        let mut arg = 0.0f64;
        for point in map.orbit_iter(z).take(n as usize) {
            let v = self.evaluate(point)?;
            if v.norm() == 0.0 {
                return Ok((f64::NEG_INFINITY, 0.0));
            }
            log_mod += v.norm().ln();
            arg += v.arg();
        }
        Ok((log_mod, arg))
    }

    /// Birkhoff average `(1/n) Σ_{k=1}^{n} log|ψ(φ_k(z))|` along an
    /// irrational rotation about the origin; tends to `log Δ_ψ(|z|)`.
    pub fn ergodic_average(
        &self,
        map: &MobiusMap,
        z: Complex64,
        n: u64,
    ) -> Result<f64, SymbolError> {
        let cls = map
            .classify()
            .map_err(|_| SymbolError::NotIrrationalRotation)?;
        if cls.kind != Kind::EllipticIrrational || cls.fixed_points[0].norm() > 1e-9 {
            return Err(SymbolError::NotIrrationalRotation);
        }
        let mut sum = 0.0f64;
        for point in map.orbit_iter(z).skip(1).take(n as usize) {
            let v = self.evaluate(point)?;
            if v.norm() < 1e-14 {
                return Err(SymbolError::ZeroOnOrbit);
            }
            sum += v.norm().ln();
        }
        Ok(sum / n as f64)
    }

    /// `max_z |ψ_(n)(z)|^{1/n}` over equispaced boundary samples, the
    /// finite-`n` quantity whose limit is `Δ_ψ(1)`. Refinement is monotone
    /// for nested (power-of-two) sample counts.
    pub fn sup_cocycle_root(&self, map: &MobiusMap, n: u64, samples: usize) -> f64 {
        let step = 2.0 * std::f64::consts::PI / samples as f64;
        let best = (0..samples)
            .into_par_iter()
            .map(|j| {
                let z = Complex64::from_polar(1.0, step * j as f64);
                let mut sum = 0.0f64;
                for point in map.orbit_iter(z).skip(1).take(n as usize) {
                    match self.evaluate(point) {
                        Ok(v) if v.norm() > 0.0 => sum += v.norm().ln(),
                        _ => return f64::NEG_INFINITY,
                    }
                }
                sum / n as f64
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        best.exp()
    }

    /// Product weight `ψ₁·ψ₂` within the class.
    pub fn multiply(&self, other: &SymbolSpec) -> Result<SymbolSpec, SymbolError> {
        let mut blaschke = self.blaschke.clone();
        blaschke.extend_from_slice(&other.blaschke);
        SymbolSpec::new(
            poly::multiply(&self.num, &other.num),
            poly::multiply(&self.den, &other.den),
            blaschke,
        )
    }

    /// Pre-composition `ψ ∘ φ` with a disk automorphism, staying in the
    /// rational × Blaschke class.
    pub fn compose_with_map(&self, map: &MobiusMap) -> Result<SymbolSpec, SymbolError> {
        let dp = self.num.len() - 1;
        let dq = self.den.len() - 1;
        let lin_num = [map.b, map.a]; // az + b, ascending order
        let lin_den = [map.d, map.c]; // cz + d
        let mut p_new = compose_poly_linear(&self.num, &lin_num, &lin_den);
        let mut q_new = compose_poly_linear(&self.den, &lin_num, &lin_den);
        // Balance the (cz+d)^degree clearing factors.
        if dq > dp {
            for _ in 0..dq - dp {
                p_new = poly::multiply(&p_new, &lin_den);
            }
        } else {
            for _ in 0..dp - dq {
                q_new = poly::multiply(&q_new, &lin_den);
            }
        }
        // Blaschke factors: b_{z₀} ∘ φ = γ · b_{φ⁻¹(z₀)} with |γ| = 1.
        let inv = map.inverse();
        let mut blaschke = Vec::with_capacity(self.blaschke.len());
        let mut phase = Complex64::new(1.0, 0.0);
        for &b in &self.blaschke {
            let pre = inv.apply(b);
            blaschke.push(pre);
            // evaluate the phase at a generic point
            let test = pick_test_point(pre);
            let lhs = {
                let w = map.apply(test);
                (w - b) / (Complex64::new(1.0, 0.0) - b.conj() * w)
            };
            let rhs = (test - pre) / (Complex64::new(1.0, 0.0) - pre.conj() * test);
            phase *= lhs / rhs;
        }
        let p_new = p_new.iter().map(|c| c * phase).collect();
        SymbolSpec::new(p_new, q_new, blaschke)
    }
}

/// `p((az+b)/(cz+d))` cleared of denominators:
/// `Σ_j p_j (az+b)^j (cz+d)^{deg-j}`.
fn compose_poly_linear(
    p: &[Complex64],
    lin_num: &[Complex64; 2],
    lin_den: &[Complex64; 2],
) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); deg + 1];
    for (j, &pj) in p.iter().enumerate() {
        let mut term = vec![pj];
        for _ in 0..j {
            term = poly::multiply(&term, lin_num);
        }
        for _ in 0..deg - j {
            term = poly::multiply(&term, lin_den);
        }
        for (slot, v) in out.iter_mut().zip(term.iter()) {
            *slot += v;
        }
    }
    out
}

fn pick_test_point(avoid: Complex64) -> Complex64 {
    for k in 0..8 {
        let t = Complex64::from_polar(0.37, 0.81 * k as f64 + 0.29);
        if (t - avoid).norm() > 0.05 {
            return t;
        }
    }
    Complex64::new(0.11, 0.07)
}

/// Synthetic division of `p` by `(z - zeta)`, discarding the remainder.
fn deflate(p: &[Complex64], zeta: Complex64) -> Vec<Complex64> {
    if p.len() <= 1 {
        return p.to_vec();
    }
    let n = p.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut carry = p[n];
    for j in (0..n).rev() {
        out[j] = carry;
        carry = p[j] + carry * zeta;
    }
    out
}

/// Mean of a 2π-periodic function by the trapezoid rule with node doubling:
/// exponentially accurate for smooth integrands. Errors out if doubling up
/// to the cap never stabilizes to [`QUAD_TOL`].
fn circle_mean(f: &dyn Fn(f64) -> f64) -> Result<f64, SymbolError> {
    let mut m = QUAD_START;
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;
    while m <= QUAD_CAP {
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let sum: f64 = (0..m).map(|j| f(step * j as f64)).sum();
        let val = sum / m as f64;
        if prev.is_finite() {
            change = (val - prev).abs();
            if change < QUAD_TOL {
                return Ok(val);
            }
        }
        prev = val;
        m *= 2;
    }
    Err(SymbolError::QuadratureNonConvergence(change))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_minus(w: f64) -> SymbolSpec {
        SymbolSpec::polynomial(&[c(-w, 0.0), c(1.0, 0.0)]).unwrap()
    }

    fn golden_rotation() -> MobiusMap {
        MobiusMap::rotation((5.0f64.sqrt() - 1.0) / 2.0)
    }

    #[test]
    fn validation_rejects_bad_symbols() {
        // denominator root on the boundary
        assert!(matches!(
            SymbolSpec::new(vec![c(1.0, 0.0)], vec![c(-1.0, 0.0), c(1.0, 0.0)], vec![]),
            Err(SymbolError::DenominatorRootInDisk(_))
        ));
        assert!(matches!(
            SymbolSpec::polynomial(&[c(0.0, 0.0)]),
            Err(SymbolError::ZeroSymbol)
        ));
        assert!(matches!(
            SymbolSpec::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]),
            Err(SymbolError::BlaschkeZeroOutsideDisk)
        ));
    }

    #[test]
    fn evaluate_examples() {
        let s = z_minus(0.5);
        assert!(s.evaluate(c(0.5, 0.0)).unwrap().norm() < 1e-15);
        assert!((s.evaluate(c(1.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let b = SymbolSpec::new(
            vec![c(1.0, 0.0)],
            vec![c(1.0, 0.0)],
            vec![c(0.0, 0.0)],
        )
        .unwrap();
        assert!((b.evaluate(c(0.3, 0.0)).unwrap() - c(0.3, 0.0)).norm() < 1e-15);
        assert!(matches!(
            s.evaluate(c(1.5, 0.0)),
            Err(SymbolError::OutsideClosedDisk)
        ));
    }

    #[test]
    fn zero_report_buckets() {
        let s = z_minus(0.5);
        let r = s.zero_report(BOUNDARY_TOL).unwrap();
        assert_eq!(r.zeros_inside.len(), 1);
        assert!(r.zeros_boundary.is_empty());
        assert!((r.min_inner_radius - 0.5).abs() < 1e-12);

        let s = z_minus(1.0);
        let r = s.zero_report(BOUNDARY_TOL).unwrap();
        assert!(r.zeros_inside.is_empty());
        assert_eq!(r.zeros_boundary.len(), 1);
        assert!(r.min_inner_radius.is_infinite());

        // (z - 1/2)(z - 1)
        let s = SymbolSpec::polynomial(&[c(0.5, 0.0), c(-1.5, 0.0), c(1.0, 0.0)]).unwrap();
        let r = s.zero_report(BOUNDARY_TOL).unwrap();
        assert_eq!((r.zeros_inside.len(), r.zeros_boundary.len()), (1, 1));
        assert!((r.min_inner_radius - 0.5).abs() < 1e-12);
        assert!(matches!(
            s.zero_report(0.1),
            Err(SymbolError::BadTolerance)
        ));
    }

    #[test]
    fn invertibility() {
        assert!(SymbolSpec::polynomial(&[c(2.0, 0.0), c(1.0, 0.0)])
            .unwrap()
            .is_invertible_weight());
        assert!(!z_minus(0.5).is_invertible_weight());
        assert!(!z_minus(1.0).is_invertible_weight());
        let with_blaschke =
            SymbolSpec::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], vec![c(0.2, 0.0)]).unwrap();
        assert!(!with_blaschke.is_invertible_weight());
    }

    #[test]
    fn delta_psi_examples() {
        let id = SymbolSpec::polynomial(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((id.delta_psi(0.7).unwrap() - 0.7).abs() < 1e-10);
        let s = z_minus(0.5);
        assert!((s.delta_psi(1.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.delta_psi(0.25).unwrap() - 0.5).abs() < 1e-10);
        assert!((s.delta_psi(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(s.delta_psi(1.2), Err(SymbolError::BadRadius)));
    }

    #[test]
    fn delta_routes_through_jensen_on_zero_circle() {
        let s = z_minus(0.5);
        // zero exactly on the circle |z| = 1/2: quadrature diverges there
        let v = s.delta_psi(0.5).unwrap();
        assert!((v - s.jensen_delta(0.5).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn jensen_examples() {
        let s = z_minus(0.5);
        assert!((s.jensen_delta(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.jensen_delta(0.4).unwrap() - 0.5).abs() < 1e-12);
        let k = SymbolSpec::constant(c(-0.3, 0.4)).unwrap();
        for r in [0.0, 0.3, 0.99, 1.0] {
            assert!((k.jensen_delta(r).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn jensen_handles_zero_at_origin() {
        // ψ(z) = z(z - 1/2): Δ(r) = r·max(r,1/2)·… by Jensen
        let s = SymbolSpec::polynomial(&[c(0.0, 0.0), c(-0.5, 0.0), c(1.0, 0.0)]).unwrap();
        let r = 0.8;
        let expect = r * 0.5 * (r / 0.5);
        assert!((s.jensen_delta(r).unwrap() - expect).abs() < 1e-12);
        assert!((s.delta_psi(r).unwrap() - expect).abs() < 1e-9);
        assert_eq!(s.jensen_delta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn delta_and_jensen_agree_at_random_radii() {
        let s = SymbolSpec::new(
            vec![c(0.3, 0.1), c(-1.0, 0.4), c(0.8, 0.0)],
            vec![c(1.0, 0.0), c(0.2, -0.3)],
            vec![c(0.3, -0.25)],
        )
        .unwrap();
        let zero_moduli: Vec<f64> = s.all_zeros().unwrap().iter().map(|z| z.norm()).collect();
        let mut checked = 0;
        for k in 1..40 {
            let r = k as f64 / 40.0;
            if zero_moduli.iter().any(|m| (m - r).abs() < 1e-3) {
                continue;
            }
            let a = s.delta_psi(r).unwrap();
            let b = s.jensen_delta(r).unwrap();
            assert!((a - b).abs() < 1e-8, "mismatch at r={r}: {a} vs {b}");
            checked += 1;
            if checked >= 20 {
                break;
            }
        }
        assert!(checked >= 20);
    }

    #[test]
    fn delta_is_nondecreasing_on_grid() {
        let s = SymbolSpec::new(
            vec![c(-0.4, 0.2), c(1.0, 0.0), c(0.0, 0.5)],
            vec![c(1.0, 0.0), c(0.0, 0.4)],
            vec![c(-0.5, 0.3)],
        )
        .unwrap();
        let mut prev = 0.0;
        for k in 0..=99 {
            let r = k as f64 / 100.0;
            let v = s.delta_psi(r).unwrap();
            assert!(v >= prev - 1e-9, "Δ decreased at r={r}");
            prev = v;
        }
    }

    #[test]
    fn delta_boundary_continuity_without_boundary_zeros() {
        let s = z_minus(0.5);
        let near = s.delta_psi(0.999).unwrap();
        let at = s.delta_psi(1.0).unwrap();
        assert!((near - at).abs() < 1e-2);
    }

    #[test]
    fn outer_modulus_examples() {
        let s = z_minus(0.5);
        assert!((s.outer_modulus_at(c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-9);
        let inner = SymbolSpec::new(
            vec![c(1.0, 0.0)],
            vec![c(1.0, 0.0)],
            vec![c(0.4, 0.2), c(-0.1, 0.0)],
        )
        .unwrap();
        for a in [c(0.0, 0.0), c(0.5, -0.3), c(-0.7, 0.1)] {
            assert!((inner.outer_modulus_at(a).unwrap() - 1.0).abs() < 1e-9);
        }
        let k = SymbolSpec::constant(c(0.0, -1.7)).unwrap();
        assert!((k.outer_modulus_at(c(0.3, 0.3)).unwrap() - 1.7).abs() < 1e-9);
    }

    #[test]
    fn outer_modulus_with_boundary_zero() {
        // ψ = z - 1 is outer with |v(0)| = 1; at a ≠ 0, |v(a)| = |a - 1|.
        let s = z_minus(1.0);
        assert!((s.outer_modulus_at(c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-9);
        let a = c(0.3, -0.2);
        assert!((s.outer_modulus_at(a).unwrap() - (a - c(1.0, 0.0)).norm()).abs() < 1e-9);
    }

    #[test]
    fn outer_modulus_is_multiplicative() {
        let s1 = z_minus(0.5);
        let s2 = SymbolSpec::new(
            vec![c(0.9, -0.1), c(0.0, 1.0)],
            vec![c(1.0, 0.0), c(-0.25, 0.25)],
            vec![c(0.1, 0.6)],
        )
        .unwrap();
        let prod = s1.multiply(&s2).unwrap();
        let a = c(0.42, 0.17);
        let lhs = prod.outer_modulus_at(a).unwrap();
        let rhs = s1.outer_modulus_at(a).unwrap() * s2.outer_modulus_at(a).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * rhs.max(1.0));
    }

    #[test]
    fn outer_equals_delta_at_origin() {
        for s in [z_minus(0.5), z_minus(1.0)] {
            let lhs = s.outer_modulus_at(c(0.0, 0.0)).unwrap();
            let rhs = s.delta_psi(1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn cocycle_examples() {
        let any = golden_rotation();
        let s = z_minus(0.5);
        assert!((s.cocycle(&any, 0, c(0.1, 0.1)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let k = SymbolSpec::constant(c(0.5, 0.5)).unwrap();
        let v = k.cocycle(&any, 5, c(0.2, 0.0)).unwrap();
        assert!((v - c(0.5, 0.5).powu(5)).norm() < 1e-12);

        // ψ(z) = z, φ(z) = iz, n = 4, z = 0.5 → -0.0625
        let id = SymbolSpec::polynomial(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rot = MobiusMap::rotation(0.25);
        let v = id.cocycle(&rot, 4, c(0.5, 0.0)).unwrap();
        assert!((v - c(-0.0625, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cocycle_law() {
        let s = SymbolSpec::new(
            vec![c(0.4, -0.3), c(1.0, 0.2)],
            vec![c(1.0, 0.0), c(0.3, 0.1)],
            vec![c(-0.2, 0.4)],
        )
        .unwrap();
        let m = MobiusMap::elliptic(c(0.2, 0.1), 0.377).unwrap();
        let z = c(0.55, -0.21);
        for (p, q) in [(3u64, 4u64), (7, 2), (1, 9)] {
            let lhs = s.cocycle(&m, p + q, z).unwrap();
            let rhs = s.cocycle(&m, p, z).unwrap()
                * s.cocycle(&m, q, m.iterate(p as i64, z)).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn ergodic_average_constant_and_identity_symbols() {
        let rot = golden_rotation();
        let k = SymbolSpec::constant(c(0.3, -0.4)).unwrap();
        let avg = k.ergodic_average(&rot, c(0.2, 0.2), 50).unwrap();
        assert!((avg - 0.5f64.ln()).abs() < 1e-12);

        let id = SymbolSpec::polynomial(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let z = c(0.3, 0.4);
        let avg = id.ergodic_average(&rot, z, 77).unwrap();
        assert!((avg - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ergodic_average_requires_irrational_rotation() {
        let s = z_minus(0.5);
        assert!(matches!(
            s.ergodic_average(&MobiusMap::rotation(0.25), c(0.1, 0.0), 10),
            Err(SymbolError::NotIrrationalRotation)
        ));
        assert!(matches!(
            s.ergodic_average(&MobiusMap::hyperbolic_r(0.5).unwrap(), c(0.1, 0.0), 10),
            Err(SymbolError::NotIrrationalRotation)
        ));
    }

    #[test]
    fn ergodic_average_detects_orbit_zero() {
        let s = z_minus(0.5);
        // φ = golden rotation, z chosen so φ_1(z) = 0.5 exactly
        let rot = golden_rotation();
        let z = rot.inverse().apply(c(0.5, 0.0));
        assert!(matches!(
            s.ergodic_average(&rot, z, 5),
            Err(SymbolError::ZeroOnOrbit)
        ));
    }

    #[test]
    fn sup_cocycle_root_simple_cases() {
        let rot = golden_rotation();
        let k = SymbolSpec::constant(c(0.0, 2.5)).unwrap();
        assert!((k.sup_cocycle_root(&rot, 17, 64) - 2.5).abs() < 1e-12);
        let id = SymbolSpec::polynomial(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((id.sup_cocycle_root(&rot, 9, 128) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compose_with_map_matches_pointwise() {
        let s = SymbolSpec::new(
            vec![c(0.2, 0.4), c(-0.9, 0.0), c(0.3, -0.3)],
            vec![c(1.0, 0.0), c(0.1, 0.5)],
            vec![c(0.45, -0.15)],
        )
        .unwrap();
        let m = MobiusMap::elliptic(c(-0.3, 0.2), 0.618).unwrap();
        let comp = s.compose_with_map(&m).unwrap();
        for k in 0..12 {
            let z = Complex64::from_polar(0.08 * k as f64, 1.7 * k as f64);
            let lhs = comp.evaluate(z).unwrap();
            let rhs = s.evaluate(m.apply(z)).unwrap();
            assert!(
                (lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()),
                "mismatch at {z}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn multiply_matches_pointwise() {
        let s1 = z_minus(0.5);
        let s2 = SymbolSpec::new(
            vec![c(1.0, 0.0), c(0.5, 0.5)],
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.6, 0.0)],
        )
        .unwrap();
        let prod = s1.multiply(&s2).unwrap();
        let z = c(0.37, -0.66);
        let lhs = prod.evaluate(z).unwrap();
        let rhs = s1.evaluate(z).unwrap() * s2.evaluate(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
