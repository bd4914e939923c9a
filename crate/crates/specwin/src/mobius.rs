//! Algebra and dynamics of Möbius maps `z ↦ (az + b)/(cz + d)`.
//!
//! The coefficient matrix is always normalized to determinant one. A
//! [`MobiusMap`] can hold any nondegenerate Möbius map (the half-plane
//! conjugacies `σ : D → H⁺` are not disk automorphisms); the
//! disk-automorphism invariant is enforced by [`MobiusMap::automorphism`]
//! and by [`MobiusMap::classify`], which every dynamical operation relies on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Boundary samples used by the disk-automorphism check.
const AUTOMORPHISM_SAMPLES: usize = 16;
/// Tolerance for `||φ(e^{iθ})| - 1|` on those samples.
const AUTOMORPHISM_TOL: f64 = 1e-9;
/// `η^n = 1` within this tolerance declares a rational rotation number.
const RATIONAL_TOL: f64 = 1e-9;
/// Largest period probed when deciding rational vs irrational.
pub const DEFAULT_MAX_PERIOD: u32 = 512;
/// Fixed-point quadratic discriminant below this (relative) threshold is a
/// double root, i.e. a parabolic map.
const PARABOLIC_DISCRIMINANT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error("coefficient matrix is degenerate: ad - bc vanishes")]
    DegenerateMap,
    #[error("map does not preserve the unit disk")]
    NotAutomorphism,
    #[error("evaluation at the pole of the map")]
    PoleAtPoint,
    #[error("point lies outside the open unit disk")]
    OutsideDisk,
    #[error("operation requires a hyperbolic or parabolic map")]
    WrongKind,
    #[error("multiplier is (numerically) a root of unity; no return-time sequence")]
    RationalMultiplier,
    #[error("multiplier must lie on the unit circle")]
    NotUnimodular,
}

/// A Möbius map `z ↦ (az + b)/(cz + d)`, normalized so that `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Conjugacy classes of disk automorphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Identity,
    /// Conjugate to a rotation by a primitive `n0`-th root of unity.
    EllipticRational(u32),
    EllipticIrrational,
    Hyperbolic,
    Parabolic,
}

/// Classification of a disk automorphism: kind, fixed points, Denjoy-Wolff
/// point and the multiplier `φ'` at the distinguished fixed point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub kind: Kind,
    /// Fixed points; the distinguished one (interior point for elliptic,
    /// Denjoy-Wolff point otherwise) comes first. Empty for the identity.
    pub fixed_points: Vec<Complex64>,
    /// Attracting fixed point of the iteration; `None` for elliptic maps
    /// and the identity.
    pub denjoy_wolff: Option<Complex64>,
    pub multiplier: Complex64,
}

/// Canonical half-plane form of a non-elliptic automorphism.
///
/// `Dilation { multiplier: s }` is the map `w ↦ w/s` on the upper half-plane
/// (so that the multiplier at the attracting end `∞` equals `s ∈ (0,1)`);
/// `Translation { sign }` is `w ↦ w ± 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Canonical {
    Dilation { multiplier: f64 },
    Translation { sign: i8 },
}

impl Canonical {
    pub fn apply(&self, w: Complex64) -> Complex64 {
        match *self {
            Canonical::Dilation { multiplier } => w / multiplier,
            Canonical::Translation { sign } => w + Complex64::new(sign as f64, 0.0),
        }
    }
}

/// A conjugacy `σ : D → H⁺` carrying the map to its canonical form,
/// i.e. `σ ∘ φ = canonical ∘ σ` on `D`. `σ` sends the Denjoy-Wolff point
/// to `∞` (and the repelling fixed point to `0` in the hyperbolic case).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfPlaneModel {
    pub sigma: MobiusMap,
    pub canonical: Canonical,
}

impl MobiusMap {
    /// Build from raw coefficients, normalizing to `ad - bc = 1`.
    pub fn from_coeffs(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MobiusError> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if det.norm() <= 1e-14 * scale * scale {
            return Err(MobiusError::DegenerateMap);
        }
        let k = ONE / det.sqrt();
        Ok(MobiusMap {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    /// Build from raw coefficients and verify the disk-automorphism invariant.
    pub fn automorphism(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MobiusError> {
        let m = Self::from_coeffs(a, b, c, d)?;
        if !m.is_disk_automorphism() {
            return Err(MobiusError::NotAutomorphism);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// Rotation `z ↦ e^{2πi t} z`.
    pub fn rotation(t: f64) -> Self {
        let eta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t);
        MobiusMap::from_coeffs(eta, ZERO, ZERO, ONE).expect("rotation is nondegenerate")
    }

    /// Elliptic automorphism with interior fixed point `fixed` and rotation
    /// angle `2π t` there: the involution exchanging `fixed` and `0`
    /// conjugates it to [`MobiusMap::rotation`].
    pub fn elliptic(fixed: Complex64, t: f64) -> Result<Self, MobiusError> {
        if fixed.norm() >= 1.0 {
            return Err(MobiusError::OutsideDisk);
        }
        let inv = Self::exchange_with_zero(fixed);
        Ok(inv.compose(&Self::rotation(t)).compose(&inv))
    }

    /// Hyperbolic automorphism `z ↦ (z + r)/(1 + rz)` with fixed points `±1`,
    /// Denjoy-Wolff point `+1` and multiplier `(1 - r)/(1 + r)` there.
    pub fn hyperbolic_r(r: f64) -> Result<Self, MobiusError> {
        if !(0.0 < r && r < 1.0) {
            return Err(MobiusError::NotAutomorphism);
        }
        MobiusMap::from_coeffs(
            ONE,
            Complex64::new(r, 0.0),
            Complex64::new(r, 0.0),
            ONE,
        )
    }

    /// Parabolic automorphism fixing `1`: the translation `w ↦ w ± 1`
    /// conjugated through the Cayley map `σ(z) = i(1 + z)/(1 - z)`.
    pub fn parabolic_cayley(sign: i8) -> Result<Self, MobiusError> {
        if sign != 1 && sign != -1 {
            return Err(MobiusError::NotAutomorphism);
        }
        let i = Complex64::new(0.0, 1.0);
        // σ⁻¹ ∘ (w + sign) ∘ σ, written out as one coefficient matrix.
        let sigma = MobiusMap::from_coeffs(i, i, -ONE, ONE)?;
        let shift = MobiusMap::from_coeffs(ONE, Complex64::new(sign as f64, 0.0), ZERO, ONE)?;
        Ok(sigma.inverse().compose(&shift).compose(&sigma))
    }

    /// The self-inverse automorphism exchanging `w` and `0`.
    pub fn exchange_with_zero(w: Complex64) -> Self {
        // z ↦ (w - z)/(1 - conj(w) z)
        MobiusMap::from_coeffs(-ONE, w, -w.conj(), ONE).expect("involution is nondegenerate")
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `φ'(z) = 1/(cz + d)²` under the determinant-one normalization.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MobiusError> {
        let den = self.c * z + self.d;
        if den.norm() < 1e-14 {
            return Err(MobiusError::PoleAtPoint);
        }
        let det = self.a * self.d - self.b * self.c;
        Ok(det / (den * den))
    }

    /// Coefficient-matrix product: `compose(m1, m2)` is the map `z ↦ m1(m2(z))`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap::from_coeffs(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
        .expect("product of nondegenerate maps is nondegenerate")
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::from_coeffs(self.d, -self.b, -self.c, self.a)
            .expect("inverse of nondegenerate map is nondegenerate")
    }

    /// `|φ(0)| < 1` plus 16-point boundary sampling of `||φ(e^{iθ})| - 1|`.
    pub fn is_disk_automorphism(&self) -> bool {
        if self.apply(ZERO).norm() >= 1.0 {
            return false;
        }
        for k in 0..AUTOMORPHISM_SAMPLES {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / AUTOMORPHISM_SAMPLES as f64;
            let z = Complex64::from_polar(1.0, theta);
            let den = self.c * z + self.d;
            if den.norm() < 1e-14 {
                return false;
            }
            if ((self.a * z + self.b).norm() / den.norm() - 1.0).abs() > AUTOMORPHISM_TOL {
                return false;
            }
        }
        true
    }

    /// `φ_n(z)` by matrix power of the coefficient matrix (exact group law).
    /// Negative `n` is routed through the inverse map. Matrices are rescaled
    /// projectively during the power so hyperbolic growth cannot overflow.
    pub fn iterate(&self, n: i64, z: Complex64) -> Complex64 {
        let m = self.power_projective(n);
        (m[0] * z + m[1]) / (m[2] * z + m[3])
    }

    /// `[φ_0(z), φ_1(z), …, φ_{len-1}(z)]` via incremental matrix products.
    pub fn orbit(&self, z: Complex64, len: usize) -> Vec<Complex64> {
        self.orbit_iter(z).take(len).collect()
    }

    /// Endless iterator over `φ_0(z), φ_1(z), …`, advancing the coefficient
    /// matrix incrementally with projective rescaling.
    pub fn orbit_iter(&self, z: Complex64) -> OrbitIter {
        OrbitIter {
            step: [self.a, self.b, self.c, self.d],
            acc: [ONE, ZERO, ZERO, ONE],
            z,
        }
    }

    /// The iterated map `φ_n` as a normalized map. Only safe for moderate
    /// `|n|`: hyperbolic coefficient growth is `O(s^{-|n|/2})` under the
    /// determinant-one normalization.
    pub fn power_map(&self, n: i64) -> Result<MobiusMap, MobiusError> {
        let m = self.power_projective(n);
        MobiusMap::from_coeffs(m[0], m[1], m[2], m[3])
    }

    fn power_projective(&self, n: i64) -> [Complex64; 4] {
        let base = if n >= 0 { *self } else { self.inverse() };
        let mut exp = n.unsigned_abs();
        let mut sq = [base.a, base.b, base.c, base.d];
        let mut acc = [ONE, ZERO, ZERO, ONE];
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mat_mul(&acc, &sq);
                rescale(&mut acc);
            }
            sq = mat_mul(&sq, &sq);
            rescale(&mut sq);
            exp >>= 1;
        }
        acc
    }

    /// Classify a disk automorphism by the location of its fixed points,
    /// probing rationality of elliptic multipliers up to period
    /// [`DEFAULT_MAX_PERIOD`].
    pub fn classify(&self) -> Result<Classification, MobiusError> {
        self.classify_with(DEFAULT_MAX_PERIOD)
    }

    /// Classify with an explicit rational-rotation search cutoff.
    pub fn classify_with(&self, max_period: u32) -> Result<Classification, MobiusError> {
        if !self.is_disk_automorphism() {
            return Err(MobiusError::NotAutomorphism);
        }
        let scale = self
            .a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm());
        // Identity: after det-1 normalization the matrix is ±I.
        if self.b.norm() <= 1e-12 * scale
            && self.c.norm() <= 1e-12 * scale
            && (self.a - self.d).norm() <= 1e-12 * scale
        {
            return Ok(Classification {
                kind: Kind::Identity,
                fixed_points: Vec::new(),
                denjoy_wolff: None,
                multiplier: ONE,
            });
        }

        // Fixed points solve c z² + (d - a) z - b = 0.
        let qa = self.c;
        let qb = self.d - self.a;
        let qc = -self.b;
        let coeff_scale = qa.norm().max(qb.norm()).max(qc.norm());

        if qa.norm() <= 1e-12 * coeff_scale {
            // Rotation about the origin (b ≈ 0 for a disk automorphism).
            let fixed = qc.norm() / qb.norm();
            debug_assert!(fixed < 1e-6, "linear fixed point should be ≈ 0");
            let multiplier = self.a / self.d;
            return Ok(self.classify_elliptic(ZERO, multiplier, max_period));
        }

        let disc = qb * qb - 4.0 * qa * qc;
        if disc.norm() < PARABOLIC_DISCRIMINANT_TOL * coeff_scale * coeff_scale {
            let p = -qb / (2.0 * qa);
            let multiplier = self.derivative(p)?;
            return Ok(Classification {
                kind: Kind::Parabolic,
                fixed_points: vec![p],
                denjoy_wolff: Some(p),
                multiplier,
            });
        }

        // Stable quadratic: q = -(b̃ + sign·√Δ)/2 with the sign avoiding
        // cancellation, then Viète for the second root.
        let sq = disc.sqrt();
        let sq = if (qb.conj() * sq).re >= 0.0 { sq } else { -sq };
        let q = -(qb + sq) / 2.0;
        let r1 = q / qa;
        let r2 = qc / q;

        let inner = [r1, r2].into_iter().find(|r| r.norm() < 1.0 - 1e-6);
        if let Some(p) = inner {
            let multiplier = self.derivative(p)?;
            return Ok(self.classify_elliptic(p, multiplier, max_period));
        }

        // Hyperbolic: both fixed points on the boundary, the Denjoy-Wolff
        // point is the one with |φ'| ≤ 1.
        let d1 = self.derivative(r1)?;
        let (dw, other, mult) = if d1.norm() <= 1.0 {
            (r1, r2, d1)
        } else {
            (r2, r1, self.derivative(r2)?)
        };
        Ok(Classification {
            kind: Kind::Hyperbolic,
            fixed_points: vec![dw, other],
            denjoy_wolff: Some(dw),
            multiplier: mult,
        })
    }

    fn classify_elliptic(
        &self,
        fixed: Complex64,
        multiplier: Complex64,
        max_period: u32,
    ) -> Classification {
        let kind = match minimal_period(multiplier, max_period) {
            Some(n0) => Kind::EllipticRational(n0),
            None => Kind::EllipticIrrational,
        };
        Classification {
            kind,
            fixed_points: vec![fixed],
            denjoy_wolff: None,
            multiplier,
        }
    }

    /// Half-plane model of a hyperbolic or parabolic automorphism.
    pub fn half_plane_model(&self) -> Result<HalfPlaneModel, MobiusError> {
        let cls = self.classify()?;
        match cls.kind {
            Kind::Hyperbolic => {
                let dw = cls.fixed_points[0];
                let other = cls.fixed_points[1];
                // T(z) = (z - other)/(dw - z) sends other ↦ 0, dw ↦ ∞ and
                // carries ∂D to a line through 0; rotate that line onto ℝ.
                let t = MobiusMap::from_coeffs(ONE, -other, -ONE, dw)?;
                let sigma = orient_to_upper(t, dw, other)?;
                let s = cls.multiplier.re;
                let model = HalfPlaneModel {
                    sigma,
                    canonical: Canonical::Dilation { multiplier: s },
                };
                verify_model(self, &model)?;
                Ok(model)
            }
            Kind::Parabolic => {
                let p = cls.fixed_points[0];
                // T(z) = 1/(p - z) sends p ↦ ∞ and ∂D to a line; rotate the
                // line horizontal, shift it onto ℝ, then rescale so the
                // conjugated translation has unit length.
                let t = MobiusMap::from_coeffs(ZERO, ONE, -ONE, p)?;
                let sigma = orient_to_upper(t, p, -p)?;
                let z0 = Complex64::new(0.1, 0.0);
                let c0 = sigma.apply(self.apply(z0)) - sigma.apply(z0);
                let scale = MobiusMap::from_coeffs(
                    Complex64::new(1.0 / c0.norm(), 0.0),
                    ZERO,
                    ZERO,
                    ONE,
                )?;
                let sigma = scale.compose(&sigma);
                let sign = if c0.re > 0.0 { 1 } else { -1 };
                let model = HalfPlaneModel {
                    sigma,
                    canonical: Canonical::Translation { sign },
                };
                verify_model(self, &model)?;
                Ok(model)
            }
            _ => Err(MobiusError::WrongKind),
        }
    }
}

/// Iterator over a Möbius orbit; see [`MobiusMap::orbit_iter`].
pub struct OrbitIter {
    step: [Complex64; 4],
    acc: [Complex64; 4],
    z: Complex64,
}

impl Iterator for OrbitIter {
    type Item = Complex64;

    fn next(&mut self) -> Option<Complex64> {
        let m = &self.acc;
        let value = (m[0] * self.z + m[1]) / (m[2] * self.z + m[3]);
        self.acc = mat_mul(&self.step, &self.acc);
        rescale(&mut self.acc);
        Some(value)
    }
}

fn mat_mul(x: &[Complex64; 4], y: &[Complex64; 4]) -> [Complex64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn rescale(m: &mut [Complex64; 4]) {
    let s = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if s > 0.0 {
        let inv = 1.0 / s;
        for c in m.iter_mut() {
            *c *= inv;
        }
    }
}

/// Smallest `n ≤ max_period` with `multiplier^n = 1` within [`RATIONAL_TOL`].
fn minimal_period(multiplier: Complex64, max_period: u32) -> Option<u32> {
    // |η^n - 1| = 2 sin(π d(n·t, ℤ)) for η = e^{2πi t}.
    let t = multiplier.arg() / (2.0 * std::f64::consts::PI);
    let tol = RATIONAL_TOL / (2.0 * std::f64::consts::PI);
    (1..=max_period).find(|&n| {
        let x = t * n as f64;
        (x - x.round()).abs() < tol
    })
}

/// Rotate (and flip) `t` so it maps `D` onto the upper half-plane. The two
/// excluded boundary points are poles/prescribed images of `t`.
fn orient_to_upper(
    t: MobiusMap,
    excl1: Complex64,
    excl2: Complex64,
) -> Result<MobiusMap, MobiusError> {
    // Pick a boundary sample away from the excluded points.
    let w0 = (0..32)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / 32.0))
        .max_by(|x, y| {
            let dx = (x - excl1).norm().min((x - excl2).norm());
            let dy = (y - excl1).norm().min((y - excl2).norm());
            dx.partial_cmp(&dy).unwrap()
        })
        .unwrap();
    let img = t.apply(w0);
    // Rotate so the boundary image line is horizontal, using a nearby second
    // boundary sample for the direction.
    let w1 = w0 * Complex64::from_polar(1.0, 0.05);
    let dir = t.apply(w1) - img;
    let rot = Complex64::from_polar(1.0, -dir.arg());
    let shifted = (img * rot).im;
    // σ = rot·t - i·shifted, then flip if the interior lands below.
    let mut sigma = MobiusMap::from_coeffs(rot, -Complex64::new(0.0, shifted), ZERO, ONE)?
        .compose(&t);
    let probe = sigma.apply(ZERO);
    if probe.im < 0.0 {
        sigma = MobiusMap::from_coeffs(-ONE, ZERO, ZERO, ONE)?.compose(&sigma);
    }
    Ok(sigma)
}

/// Check `σ ∘ φ = canonical ∘ σ` on 8 interior test points within 1e-9.
fn verify_model(map: &MobiusMap, model: &HalfPlaneModel) -> Result<(), MobiusError> {
    for k in 0..8 {
        let z = Complex64::from_polar(0.65, 2.0 * std::f64::consts::PI * (k as f64 + 0.21) / 8.0);
        let lhs = model.sigma.apply(map.apply(z));
        let rhs = model.canonical.apply(model.sigma.apply(z));
        if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
            return Err(MobiusError::NotAutomorphism);
        }
    }
    Ok(())
}

/// Pseudo-hyperbolic distance `|(z - w)/(1 - w̄ z)|` on the open disk.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> Result<f64, MobiusError> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(MobiusError::OutsideDisk);
    }
    Ok(((z - w) / (ONE - w.conj() * z)).norm())
}

/// Return times `n_j` of an irrational rotation: the continued-fraction
/// convergent denominators of the rotation number, along which
/// `|η^{n_j} - 1|` decreases to zero.
pub fn return_times(multiplier: Complex64, count: usize) -> Result<Vec<u64>, MobiusError> {
    if (multiplier.norm() - 1.0).abs() > 1e-9 {
        return Err(MobiusError::NotUnimodular);
    }
    if minimal_period(multiplier, DEFAULT_MAX_PERIOD).is_some() {
        return Err(MobiusError::RationalMultiplier);
    }
    let mut g = multiplier.arg() / (2.0 * std::f64::consts::PI);
    g -= g.floor();
    let mut denominators = vec![1u64];
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut x = g;
    while denominators.len() < count + 8 {
        if x < 1e-13 {
            break;
        }
        let inv = 1.0 / x;
        let a = inv.floor();
        if a >= 1e15 {
            break;
        }
        x = inv - a;
        let next = (a as u64).saturating_mul(q).saturating_add(q_prev);
        q_prev = q;
        q = next;
        if denominators.last() != Some(&q) {
            denominators.push(q);
        }
        if q > (1 << 52) {
            break;
        }
    }
    denominators.truncate(count);
    Ok(denominators)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden() -> f64 {
        (5.0f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn determinant_is_normalized() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let det = m.a * m.d - m.b * m.c;
        assert!((det - ONE).norm() < 1e-12);
    }

    #[test]
    fn rotation_by_i_classifies_as_period_four() {
        let m = MobiusMap::rotation(0.25);
        let cls = m.classify().unwrap();
        assert_eq!(cls.kind, Kind::EllipticRational(4));
        assert!(cls.fixed_points[0].norm() < 1e-12);
        assert!((cls.multiplier - c(0.0, 1.0)).norm() < 1e-12);
        assert!(cls.denjoy_wolff.is_none());
    }

    #[test]
    fn hyperbolic_half_example() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let cls = m.classify().unwrap();
        assert_eq!(cls.kind, Kind::Hyperbolic);
        let dw = cls.denjoy_wolff.unwrap();
        assert!((dw - ONE).norm() < 1e-9);
        assert!((cls.multiplier - c(1.0 / 3.0, 0.0)).norm() < 1e-9);
        let mut moduli: Vec<f64> = cls.fixed_points.iter().map(|p| (p.norm() - 1.0).abs()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(moduli[1] < 1e-8);
        // other fixed point is -1
        assert!((cls.fixed_points[1] + ONE).norm() < 1e-9);
    }

    #[test]
    fn parabolic_cayley_example() {
        // Conjugating w ↦ w + 1 through σ(z) = i(1+z)/(1-z) gives
        // ((2i-1)z + 1)/(-z + 1 + 2i) up to normalization.
        let m = MobiusMap::parabolic_cayley(1).unwrap();
        let reference =
            MobiusMap::automorphism(c(-1.0, 2.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 2.0)).unwrap();
        for k in 0..5 {
            let z = Complex64::from_polar(0.4, 1.3 * k as f64);
            assert!((m.apply(z) - reference.apply(z)).norm() < 1e-12);
        }
        let cls = m.classify().unwrap();
        assert_eq!(cls.kind, Kind::Parabolic);
        assert!((cls.fixed_points[0] - ONE).norm() < 1e-8);
        assert!((cls.multiplier - ONE).norm() < 1e-8);
    }

    #[test]
    fn classify_rejects_non_automorphism() {
        // z ↦ z/2 shrinks the disk.
        let m = MobiusMap::from_coeffs(c(0.5, 0.0), ZERO, ZERO, ONE).unwrap();
        assert_eq!(m.classify().unwrap_err(), MobiusError::NotAutomorphism);
    }

    #[test]
    fn degenerate_coefficients_rejected() {
        assert_eq!(
            MobiusMap::from_coeffs(ONE, ONE, ONE, ONE).unwrap_err(),
            MobiusError::DegenerateMap
        );
    }

    #[test]
    fn iterate_period_four_rotation() {
        let m = MobiusMap::rotation(0.25);
        let z = c(0.3, 0.0);
        assert!((m.iterate(4, z) - z).norm() < 1e-12);
        assert!((m.iterate(0, c(0.1, -0.4)) - c(0.1, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn iterate_hyperbolic_by_hand() {
        // 0 → 1/2 → 4/5 → 13/14 under (z + 1/2)/(1 + z/2).
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        assert!((m.iterate(3, ZERO) - c(13.0 / 14.0, 0.0)).norm() < 1e-12);
        let orbit = m.orbit(ZERO, 4);
        assert!((orbit[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((orbit[2] - c(0.8, 0.0)).norm() < 1e-12);
        assert!((orbit[3] - c(13.0 / 14.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let m = MobiusMap::elliptic(c(0.3, -0.2), 0.123).unwrap();
        let e = m.compose(&m.inverse());
        for k in 0..4 {
            let z = Complex64::from_polar(0.7, k as f64);
            assert!((e.apply(z) - z).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_of_rotation() {
        let m = MobiusMap::rotation(0.25).inverse();
        assert!((m.apply(c(0.2, 0.0)) - c(0.0, -0.2)).norm() < 1e-12);
    }

    #[test]
    fn compose_rotations_adds_angles() {
        let m = MobiusMap::rotation(0.15).compose(&MobiusMap::rotation(0.2));
        let want = MobiusMap::rotation(0.35);
        let z = c(0.5, 0.1);
        assert!((m.apply(z) - want.apply(z)).norm() < 1e-12);
    }

    #[test]
    fn derivative_values() {
        let rot = MobiusMap::rotation(0.25);
        assert!((rot.derivative(c(0.3, 0.2)).unwrap() - c(0.0, 1.0)).norm() < 1e-12);
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        assert!((m.derivative(ONE).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((m.derivative(-ONE).unwrap() - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn derivative_at_pole_errors() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        assert_eq!(m.derivative(c(-2.0, 0.0)).unwrap_err(), MobiusError::PoleAtPoint);
    }

    #[test]
    fn pseudo_hyperbolic_values() {
        let z = c(0.5, 0.0);
        assert_eq!(pseudo_hyperbolic(z, z).unwrap(), 0.0);
        assert!((pseudo_hyperbolic(ZERO, c(0.3, -0.4)).unwrap() - 0.5).abs() < 1e-15);
        let d = pseudo_hyperbolic(c(0.5, 0.0), c(0.25, 0.0)).unwrap();
        assert!((d - 0.25 / 0.875).abs() < 1e-15);
        assert_eq!(
            pseudo_hyperbolic(c(1.0, 0.0), ZERO).unwrap_err(),
            MobiusError::OutsideDisk
        );
    }

    #[test]
    fn pseudo_hyperbolic_is_moebius_invariant() {
        let g = MobiusMap::elliptic(c(-0.4, 0.1), 0.37).unwrap();
        let (z, w) = (c(0.21, -0.53), c(-0.62, 0.17));
        let d1 = pseudo_hyperbolic(z, w).unwrap();
        let d2 = pseudo_hyperbolic(g.apply(z), g.apply(w)).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn group_law_random_powers() {
        let maps = [
            MobiusMap::hyperbolic_r(0.5).unwrap(),
            MobiusMap::parabolic_cayley(-1).unwrap(),
            MobiusMap::elliptic(c(0.2, 0.3), golden()).unwrap(),
        ];
        for (i, m) in maps.iter().enumerate() {
            for (p, q) in [(3i64, 5i64), (7, -2), (-4, -6), (20, 13)] {
                let z = Complex64::from_polar(0.83, 0.7 * i as f64 + 0.1);
                let lhs = m.iterate(p + q, z);
                let rhs = m.iterate(p, m.iterate(q, z));
                assert!((lhs - rhs).norm() < 1e-10, "group law failed for map {i}");
            }
        }
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let g = MobiusMap::elliptic(c(0.1, 0.55), 0.29).unwrap();
        let maps = [
            MobiusMap::rotation(0.25),
            MobiusMap::rotation(golden()),
            MobiusMap::hyperbolic_r(0.3).unwrap(),
            MobiusMap::parabolic_cayley(1).unwrap(),
        ];
        for m in maps {
            let conj = g.compose(&m).compose(&g.inverse());
            assert_eq!(
                conj.classify().unwrap().kind,
                m.classify().unwrap().kind,
                "conjugation changed the kind"
            );
        }
    }

    #[test]
    fn denjoy_wolff_attracts() {
        for m in [
            MobiusMap::hyperbolic_r(0.5).unwrap(),
            MobiusMap::parabolic_cayley(1).unwrap(),
        ] {
            let dw = m.classify().unwrap().denjoy_wolff.unwrap();
            for k in 0..6 {
                let z = Complex64::from_polar(0.9, 1.1 * k as f64);
                assert!((m.iterate(50, z) - dw).norm() < 0.05);
            }
        }
    }

    #[test]
    fn half_plane_model_hyperbolic() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let model = m.half_plane_model().unwrap();
        match model.canonical {
            Canonical::Dilation { multiplier } => assert!((multiplier - 1.0 / 3.0).abs() < 1e-9),
            _ => panic!("expected a dilation"),
        }
        // Round trip: σ⁻¹ ∘ canonical ∘ σ reproduces φ.
        let inv = model.sigma.inverse();
        for k in 0..8 {
            let z = Complex64::from_polar(0.77, 0.9 * k as f64);
            let back = inv.apply(model.canonical.apply(model.sigma.apply(z)));
            assert!((back - m.apply(z)).norm() < 1e-9);
        }
        // σ maps into the upper half-plane.
        for k in 0..8 {
            let z = Complex64::from_polar(0.95, 0.8 * k as f64 + 0.3);
            assert!(model.sigma.apply(z).im > 0.0);
        }
    }

    #[test]
    fn half_plane_model_parabolic_signs() {
        for sign in [1i8, -1] {
            let m = MobiusMap::parabolic_cayley(sign).unwrap();
            let model = m.half_plane_model().unwrap();
            match model.canonical {
                Canonical::Translation { sign: s } => assert_eq!(s, sign),
                _ => panic!("expected a translation"),
            }
            let inv = model.sigma.inverse();
            for k in 0..8 {
                let z = Complex64::from_polar(0.6, 1.3 * k as f64);
                let back = inv.apply(model.canonical.apply(model.sigma.apply(z)));
                assert!((back - m.apply(z)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn half_plane_model_rejects_elliptic() {
        let m = MobiusMap::rotation(golden());
        assert_eq!(m.half_plane_model().unwrap_err(), MobiusError::WrongKind);
    }

    #[test]
    fn return_times_golden_are_fibonacci() {
        let eta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * golden());
        let times = return_times(eta, 7).unwrap();
        assert_eq!(times, vec![1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn return_times_one_over_pi() {
        let eta = Complex64::from_polar(1.0, 2.0);
        // rotation number 1/π: convergent denominators 1, 3, 22, 333, …
        let times = return_times(eta, 4).unwrap();
        assert_eq!(times, vec![1, 3, 22, 333]);
    }

    #[test]
    fn return_times_reject_rational() {
        assert_eq!(
            return_times(c(0.0, 1.0), 5).unwrap_err(),
            MobiusError::RationalMultiplier
        );
    }

    #[test]
    fn return_times_shrink_multiplier_distance() {
        let eta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * golden());
        let times = return_times(eta, 10).unwrap();
        let mut last = f64::INFINITY;
        for &n in &times {
            let gap = (eta.powu(n as u32) - ONE).norm();
            assert!(gap < last + 1e-15, "return times must improve recurrence");
            last = gap;
        }
        assert!(last < 1e-3);
    }
}
