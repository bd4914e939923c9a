//! Approximate-eigenvector witnesses: explicit kernel combinations `h` with
//! small `‖(C* - λ)h‖/‖h‖`, certifying numerically that λ lies in the
//! (approximate or compression) spectrum. Each construction follows one of
//! the proof schemes:
//!
//! * [`witness_rational_rotation`] — exact eigenvectors of `C*` along a
//!   periodic orbit (rational rotation number);
//! * [`witness_elliptic_boundary`] — boundary-zero scheme for irrational
//!   rotations, with Blaschke-guarded radii;
//! * [`witness_level_circle`] / [`witness_inner_zero`] — level-circle
//!   schemes along recurrence times of an irrational rotation;
//! * [`witness_backward_orbit`] — inverse-orbit scheme for hyperbolic and
//!   parabolic maps, with interpolation floors from Blaschke products.
//!
//! Residuals are evaluated through exact adjoint action on kernels and Gram
//! forms of normalized kernels. Backward-orbit Grams are computed in
//! half-plane coordinates: near the attracting boundary point, `1 - |z_k|²`
//! underflows long before the Gram entries lose meaning, and the half-plane
//! parametrization sidesteps that entirely.

use crate::mobius::{self, Canonical, Kind, MobiusMap};
use crate::space::{KernelCombination, SpaceSpec};
use crate::symbol::{SymbolError, SymbolSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("construction requires a different automorphism kind")]
    WrongKind,
    #[error("map must be a rotation about the origin with irrational rotation number")]
    NotIrrationalRotation,
    #[error("|λ| = {lambda:.6} exceeds the certified radius {guarantee:.6} of this construction")]
    LambdaOutsideGuarantee { lambda: f64, guarantee: f64 },
    #[error("weight vanishes on the backward orbit")]
    ZeroOnBackwardOrbit,
    #[error("weight vanishes on the sampled orbit")]
    ZeroOnOrbit,
    #[error("weight has no boundary zero")]
    NoBoundaryZero,
    #[error("weight has no zero inside the disk away from the origin")]
    NoUsableInnerZero,
    #[error("no recurrence times available: rational multiplier")]
    ReturnTimesUnavailable,
    #[error("point too close to the parabolic fixed point for an interpolation floor")]
    TooCloseToParabolicFixedPoint,
    #[error("point lies outside the open unit disk")]
    OutsideDisk,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Mobius(#[from] mobius::MobiusError),
}

/// Which proof scheme produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    EllipticBoundaryZero,
    EllipticInnerZero,
    EllipticLevelCircle,
    RationalRotationExact,
    BackwardOrbit,
}

/// Concrete scan budgets for the non-constructive choices in the proofs
/// (base points, recurrence depths, Birkhoff certification thresholds).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WitnessSchedule {
    /// Number of stages to record.
    pub stages: usize,
    /// Scan attempts per stage when certifying a Birkhoff threshold.
    pub scan_candidates: usize,
    /// Cap on orbit length / recurrence depth.
    pub max_orbit: usize,
    /// Birkhoff threshold as a fraction of the target value.
    pub birkhoff_fraction: f64,
}

impl Default for WitnessSchedule {
    fn default() -> Self {
        WitnessSchedule {
            stages: 8,
            scan_candidates: 40,
            max_orbit: 10_000,
            birkhoff_fraction: 0.95,
        }
    }
}

/// One stage of a witness run: the vector, its certified norm floor, and
/// the residual achieved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessStage {
    pub index: usize,
    /// Number of kernel terms along the orbit.
    pub orbit_len: usize,
    /// The λ this stage certifies (level-circle schemes select it per stage).
    pub lambda: Complex64,
    /// Base point of the stage's orbit.
    pub base_point: Complex64,
    /// The witness vector, as an explicit kernel combination. For deep
    /// hyperbolic orbits the far coefficients may underflow in this
    /// unnormalized representation; `norm`, `floor` and `residual` are
    /// computed through the stable path and are authoritative.
    pub combination: KernelCombination,
    /// `‖h‖`, stably computed.
    pub norm: f64,
    /// Certified lower bound for `‖h‖` (always positive).
    pub floor: f64,
    /// `‖(C* - λ)h‖`.
    pub raw_residual_norm: f64,
    /// `‖(C* - λ)h‖ / ‖h‖`.
    pub residual: f64,
    /// Proof-side upper bound for `‖(C* - λ)h‖` at this stage.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessRun {
    pub construction: Construction,
    /// Target λ of the run (for level-circle schemes: the last selected λ).
    pub lambda: Complex64,
    /// Certified radius of the construction, when one applies.
    pub guarantee: Option<f64>,
    pub stages: Vec<WitnessStage>,
    /// Set when a Birkhoff certification ran out of scan budget; the run
    /// still reports the stages it completed.
    pub schedule_exhausted: bool,
}

impl WitnessRun {
    pub fn final_residual(&self) -> f64 {
        self.stages.last().map(|s| s.residual).unwrap_or(f64::NAN)
    }
}

/// Finite Blaschke product `Π (z - z_k)/(1 - z̄_k z)`.
pub fn blaschke_eval(zeros: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = C_ONE;
    for &w in zeros {
        acc *= (z - w) / (C_ONE - w.conj() * z);
    }
    acc
}

/// Partial interpolation product `Π_{k=1}^{n} d(z, φ_k(z))` along the
/// forward orbit of a hyperbolic or parabolic automorphism. Nonincreasing
/// in `n`; for hyperbolic maps it stays above the closed-form floor
/// `Π (1-s^k)/(1+s^k)`. Parabolic maps need `z` bounded away from the
/// fixed point.
pub fn blaschke_lower_bound(
    map: &MobiusMap,
    z: Complex64,
    n_terms: usize,
) -> Result<f64, WitnessError> {
    if z.norm() >= 1.0 {
        return Err(WitnessError::OutsideDisk);
    }
    let cls = map.classify()?;
    match cls.kind {
        Kind::Hyperbolic => {}
        Kind::Parabolic => {
            let p = cls.fixed_points[0];
            if (z - p).norm() <= 1e-6 {
                return Err(WitnessError::TooCloseToParabolicFixedPoint);
            }
        }
        _ => return Err(WitnessError::WrongKind),
    }
    // Work in the half-plane model: the pseudo-hyperbolic distance is
    // ρ(w₁,w₂) = |w₁-w₂|/|w₁-w̄₂| there, stable along deep orbits.
    let model = map.half_plane_model()?;
    let w0 = model.sigma.apply(z);
    let mut log_product = 0.0f64;
    for k in 1..=n_terms {
        let wk = half_plane_point(&model.canonical, w0, k as i64);
        let d = ((w0 - wk) / (w0 - wk.conj())).norm();
        if d <= 0.0 {
            return Ok(0.0);
        }
        log_product += d.ln();
        if 1.0 - d < 1e-15 && k > 8 {
            break; // remaining factors are 1 to machine precision
        }
    }
    Ok(log_product.exp())
}

/// Closed-form hyperbolic floor partial products `Π_{k=1}^{n} (1-s^k)/(1+s^k)`.
pub fn hyperbolic_floor_partials(s: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 1.0f64;
    let mut sk = 1.0f64;
    for _ in 1..=n {
        sk *= s;
        acc *= (1.0 - sk) / (1.0 + sk);
        out.push(acc);
    }
    out
}

fn half_plane_point(canonical: &Canonical, w0: Complex64, k: i64) -> Complex64 {
    match *canonical {
        Canonical::Dilation { multiplier } => w0 * multiplier.powi(-k as i32),
        Canonical::Translation { sign } => w0 + Complex64::new(sign as f64 * k as f64, 0.0),
    }
}

/// Orbit geometry for normalized-kernel Grams along a non-elliptic orbit,
/// entirely in half-plane coordinates. For points `z_k = σ⁻¹(w_k)`:
///
/// `⟨e_{z_j}, e_{z_k}⟩ = [ conj(P_j) P_k · 2√(Im w_j Im w_k) / (i (w̄_j - w_k)) ]^κ`
///
/// with `P_k` the phase of `σ.a - σ.c · w_k` (σ⁻¹'s denominator) and κ the
/// kernel exponent. The bracket lies in the right half-plane, so the
/// principal power is safe.
struct OrbitGeometry {
    canonical: Canonical,
    w0: Complex64,
    sigma_a: Complex64,
    sigma_c: Complex64,
    kappa: f64,
    /// `1 - |z₀|²` at the interior base point (no cancellation there).
    base_t: f64,
}

impl OrbitGeometry {
    fn w(&self, k: i64) -> Complex64 {
        half_plane_point(&self.canonical, self.w0, k)
    }

    fn phase(&self, k: i64) -> Complex64 {
        let q = match self.canonical {
            Canonical::Dilation { multiplier } => {
                let scale = multiplier.powi(-k as i32);
                if scale.is_finite() && scale * self.w0.norm() < 1e120 {
                    self.sigma_a - self.sigma_c * (self.w0 * scale)
                } else {
                    // Dominant term only; the phase limit is exact since the
                    // dropped part is relatively ~1e-120.
                    -self.sigma_c * self.w0
                }
            }
            Canonical::Translation { .. } => self.sigma_a - self.sigma_c * self.w(k),
        };
        q / q.norm()
    }

    /// Stable core `2√(Im w_j Im w_k)/(i(w̄_j - w_k))`, factored so that
    /// dilation orbits never overflow.
    fn core(&self, j: i64, k: i64) -> Complex64 {
        if j > k {
            return self.core(k, j).conj();
        }
        match self.canonical {
            Canonical::Dilation { multiplier } => {
                // w_m = ρ^m w0 with ρ = 1/multiplier > 1; divide through by ρ^k.
                let m = (k - j) as i32;
                let shrink = multiplier.powi(m); // ρ^{-m} ∈ (0,1]
                let num = 2.0 * shrink.sqrt() * self.w0.im;
                let den = Complex64::new(0.0, 1.0) * (self.w0.conj() * shrink - self.w0);
                Complex64::new(num, 0.0) / den
            }
            Canonical::Translation { sign } => {
                let m = (k - j) as f64 * sign as f64;
                let den = Complex64::new(2.0 * self.w0.im, -m);
                Complex64::new(2.0 * self.w0.im, 0.0) / den
            }
        }
    }

    /// `⟨e_{z_j}, e_{z_k}⟩` for the space exponent κ.
    fn gram(&self, j: i64, k: i64) -> Complex64 {
        let hardy = self.phase(j).conj() * self.phase(k) * self.core(j, k);
        if self.kappa == 1.0 {
            return hardy;
        }
        if hardy.norm() == 0.0 {
            return C_ZERO;
        }
        (self.kappa * hardy.ln()).exp()
    }

    /// `log(1 - |z_k|²)` along the orbit: `t_k/t_0 = (Im w_k/|q_k|²) /
    /// (Im w_0/|q_0|²)`, evaluated in log space so deep dilation orbits
    /// cannot overflow.
    fn log_t(&self, k: i64) -> f64 {
        let q0 = self.sigma_a - self.sigma_c * self.w0;
        let (log_im_ratio, log_q_sq) = match self.canonical {
            Canonical::Dilation { multiplier } => {
                let log_rho = -multiplier.ln(); // ρ = 1/multiplier > 1
                let log_wk_mag = k as f64 * log_rho + self.w0.norm().ln();
                let log_q = if log_wk_mag < 230.0 {
                    (self.sigma_a - self.sigma_c * self.w(k)).norm().ln()
                } else {
                    (self.sigma_c * self.w0).norm().ln() + k as f64 * log_rho
                };
                (k as f64 * log_rho, 2.0 * log_q)
            }
            Canonical::Translation { .. } => {
                let log_q = (self.sigma_a - self.sigma_c * self.w(k)).norm().ln();
                (0.0, 2.0 * log_q)
            }
        };
        self.base_t.ln() + log_im_ratio - log_q_sq + 2.0 * q0.norm().ln()
    }
}

/// `‖Σ c_k e_{idx_k}‖` over normalized kernels at orbit indices `idx`.
fn orbit_combo_norm(geom: &OrbitGeometry, coeffs: &[(i64, Complex64)]) -> f64 {
    let mut acc = 0.0f64;
    for &(j, cj) in coeffs {
        for &(k, ck) in coeffs {
            acc += (cj * ck.conj() * geom.gram(j, k)).re;
        }
    }
    acc.max(0.0).sqrt()
}

/// Exact eigenvector of `C*` along a periodic orbit: `φ` elliptic with
/// multiplier a primitive `n₀`-th root of unity, `λ₀` an `n₀`-th root of
/// `ψ_{(n₀)}(z₀)`. When ψ vanishes on the orbit, the single-kernel
/// eigenvector at eigenvalue 0 is returned.
pub fn witness_rational_rotation(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    z0: Complex64,
) -> Result<WitnessRun, WitnessError> {
    if z0.norm() >= 1.0 {
        return Err(WitnessError::OutsideDisk);
    }
    let cls = map.classify()?;
    let n0 = match cls.kind {
        Kind::EllipticRational(n0) => n0 as usize,
        Kind::Identity => 1,
        _ => return Err(WitnessError::WrongKind),
    };
    let orbit = map.orbit(z0, n0);
    let values: Vec<Complex64> = orbit
        .iter()
        .map(|&z| symbol.evaluate(z))
        .collect::<Result<_, _>>()?;

    let (lambda, h) = if let Some(k0) = values.iter().position(|v| v.norm() < 1e-13) {
        // λ = 0 branch: ψ(φ_{k0}(z₀)) = 0 kills the kernel there.
        let h = KernelCombination::new(space, vec![(C_ONE, orbit[k0])])
            .map_err(|_| WitnessError::OutsideDisk)?;
        (C_ZERO, h)
    } else {
        let product: Complex64 = values.iter().product();
        let lambda =
            Complex64::from_polar(product.norm().powf(1.0 / n0 as f64), product.arg() / n0 as f64);
        let mut terms = vec![(C_ONE, orbit[0])];
        let mut acc = C_ONE;
        for k in 1..n0 {
            acc *= values[k - 1].conj() / lambda.conj();
            terms.push((acc, orbit[k]));
        }
        let h = KernelCombination::new(space, terms).map_err(|_| WitnessError::OutsideDisk)?;
        (lambda, h)
    };

    let image = h.adjoint(symbol, map).map_err(|_| WitnessError::OutsideDisk)?;
    let residual_vec = image.sub_scaled(lambda.conj(), &h);
    let norm = h.norm().map_err(|_| WitnessError::OutsideDisk)?;
    let raw = residual_vec.norm().map_err(|_| WitnessError::OutsideDisk)?;

    // Interpolation floor: project onto the Blaschke product vanishing at
    // the other orbit points.
    let base = h.terms[0].1;
    let others: Vec<Complex64> = h.terms.iter().skip(1).map(|t| t.1).collect();
    let floor = blaschke_eval(&others, base).norm() * space.kernel_norm(base);

    let stage = WitnessStage {
        index: 0,
        orbit_len: h.terms.len(),
        lambda,
        base_point: base,
        combination: h,
        norm,
        floor,
        raw_residual_norm: raw,
        residual: raw / norm,
        bound: 1e-10,
    };
    Ok(WitnessRun {
        construction: Construction::RationalRotationExact,
        lambda,
        guarantee: None,
        stages: vec![stage],
        schedule_exhausted: false,
    })
}

/// Helper picking backward-orbit base points on a ray toward a zero of ψ,
/// as the inverse-orbit construction wants when the operator is not
/// invertible.
pub fn base_points_toward_zero(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    count: usize,
) -> Result<Vec<Complex64>, WitnessError> {
    let report = symbol.zero_report(crate::symbol::BOUNDARY_TOL)?;
    let zero = report
        .zeros_inside
        .first()
        .copied()
        .or_else(|| report.zeros_boundary.first().copied())
        .ok_or(WitnessError::ZeroOnOrbit)?;
    let direction = if zero.norm() > 1e-9 {
        -zero / zero.norm()
    } else {
        let cls = map.classify()?;
        let dw = cls.denjoy_wolff.ok_or(WitnessError::WrongKind)?;
        -dw / dw.norm()
    };
    Ok((0..count)
        .map(|j| zero + direction * 0.3 * 0.72f64.powi(j as i32))
        .collect())
}

/// Inverse-orbit construction for hyperbolic/parabolic maps. Certified for
/// `|λ| < |ψ(b)| φ'(b)^{-κ/2}` with `b` the Denjoy-Wolff point of `φ⁻¹`;
/// larger λ are rejected with the guarantee radius in the error.
pub fn witness_backward_orbit(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    lambda: Complex64,
    base_points: &[Complex64],
    n_terms: usize,
) -> Result<WitnessRun, WitnessError> {
    let guarantee = backward_orbit_guarantee(symbol, map, space)?;
    if lambda.norm() >= guarantee {
        return Err(WitnessError::LambdaOutsideGuarantee {
            lambda: lambda.norm(),
            guarantee,
        });
    }
    backward_orbit_run(symbol, map, space, lambda, base_points, n_terms)
}

/// The certified radius of the inverse-orbit construction:
/// `|ψ(b)| φ'(b)^{-κ/2}` at the Denjoy-Wolff point `b` of `φ⁻¹`.
pub fn backward_orbit_guarantee(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
) -> Result<f64, WitnessError> {
    let cls = map.classify()?;
    if !matches!(cls.kind, Kind::Hyperbolic | Kind::Parabolic) {
        return Err(WitnessError::WrongKind);
    }
    let b = map
        .inverse()
        .classify()?
        .denjoy_wolff
        .ok_or(WitnessError::WrongKind)?;
    let b = b / b.norm();
    let weight = symbol.evaluate(b)?.norm();
    let deriv = map.derivative(b)?.norm();
    Ok(weight * deriv.powf(-space.kernel_exponent() / 2.0))
}

/// The inverse-orbit construction run without the λ-range guard. The
/// construction is still evaluated faithfully; outside the certified radius
/// its residuals provably plateau instead of decaying, and running it there
/// documents that behavior.
pub fn witness_backward_orbit_unchecked(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    lambda: Complex64,
    base_points: &[Complex64],
    n_terms: usize,
) -> Result<WitnessRun, WitnessError> {
    backward_orbit_run(symbol, map, space, lambda, base_points, n_terms)
}

fn backward_orbit_run(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    lambda: Complex64,
    base_points: &[Complex64],
    n_terms: usize,
) -> Result<WitnessRun, WitnessError> {
    let guarantee = backward_orbit_guarantee(symbol, map, space)?;
    let inverse = map.inverse();
    let model = inverse.half_plane_model()?;
    let kappa = space.kernel_exponent();
    let e = kappa / 2.0;
    // Recorded q for the proof-side tail bound: geometric mean between |λ|
    // and the guarantee when λ is inside, else the guarantee itself.
    let q_rec = if lambda.norm() > 0.0 && lambda.norm() < guarantee {
        (lambda.norm() * guarantee).sqrt()
    } else {
        guarantee
    };

    let sigma_inv = model.sigma.inverse();
    let mut stages = Vec::with_capacity(base_points.len());
    for (index, &base) in base_points.iter().enumerate() {
        if base.norm() >= 1.0 {
            return Err(WitnessError::OutsideDisk);
        }
        let geom = OrbitGeometry {
            canonical: model.canonical,
            w0: model.sigma.apply(base),
            sigma_a: model.sigma.a,
            sigma_c: model.sigma.c,
            kappa,
            base_t: 1.0 - base.norm_sqr(),
        };
        // Orbit points z_k = φ⁻¹_k(base); index -1 is φ(base). Dilation
        // coordinates overflow near k·log ρ ≈ 700, so deep hyperbolic tails
        // are truncated there (their coefficients are negligible anyway).
        let mut len = n_terms;
        if let Canonical::Dilation { multiplier } = model.canonical {
            let max_len = (250.0 / (1.0 / multiplier).ln()).floor() as usize;
            len = len.min(max_len.max(8));
        }
        let zs: Vec<Complex64> = (0..len as i64).map(|k| sigma_inv.apply(geom.w(k))).collect();

        let mut u = Vec::with_capacity(len);
        for (k, &zk) in zs.iter().enumerate() {
            let v = symbol.evaluate(zk)?;
            if k >= 1 && v.norm() < 1e-14 {
                return Err(WitnessError::ZeroOnBackwardOrbit);
            }
            let deriv = map.derivative(zk)?.norm();
            u.push(v.conj() * deriv.powf(-e));
        }

        // Coefficients c_0 = 1, c_k = λ^k / Π_{s=1}^k u_s.
        let mut coeffs: Vec<(i64, Complex64)> = vec![(0, C_ONE)];
        let mut acc = C_ONE;
        for k in 1..len {
            acc *= lambda / u[k];
            if !acc.norm().is_finite() {
                break;
            }
            coeffs.push((k as i64, acc));
        }
        let used_len = coeffs.len();

        let norm = orbit_combo_norm(&geom, &coeffs);
        // Residual vector: u_0 e_{-1} - λ·c_{last} e_{last}.
        let top = lambda * coeffs[used_len - 1].1;
        let res_coeffs = [(-1i64, u[0]), (used_len as i64 - 1, -top)];
        let raw = orbit_combo_norm(&geom, &res_coeffs);
        let residual = raw / norm;

        let floor = blaschke_lower_bound(&inverse, base, 20_000)?;
        let bound = u[0].norm()
            + lambda.norm().powi(used_len as i32) * lambda.norm() / q_rec.powi(used_len as i32);

        // Export the stage vector over unnormalized kernels; far
        // coefficients may underflow, the stable numbers above are the
        // authoritative record.
        let mut terms = Vec::with_capacity(used_len);
        for &(k, c) in &coeffs {
            let zk = zs[k as usize];
            let inv_norm = (e * geom.log_t(k)).exp(); // 1/‖K_{z_k}‖ = t_k^{κ/2}
            terms.push((c * inv_norm, zk));
        }
        let combination =
            KernelCombination::new(space, terms).map_err(|_| WitnessError::OutsideDisk)?;

        stages.push(WitnessStage {
            index,
            orbit_len: used_len,
            lambda,
            base_point: base,
            combination,
            norm,
            floor,
            raw_residual_norm: raw,
            residual,
            bound,
        });
    }
    Ok(WitnessRun {
        construction: Construction::BackwardOrbit,
        lambda,
        guarantee: Some(guarantee),
        stages,
        schedule_exhausted: false,
    })
}

/// Boundary-zero construction for irrational rotations: boundary points
/// `ζ_j → ζ` with certified Birkhoff products, radii `r_j → 1` with a
/// Blaschke guard `|B_{j,r}(r ζ_j)| > 1/2`, and two-term exact residuals.
pub fn witness_elliptic_boundary(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    lambda: Complex64,
    schedule: &WitnessSchedule,
) -> Result<WitnessRun, WitnessError> {
    let eta = rotation_multiplier(map)?;
    let report = symbol.zero_report(crate::symbol::BOUNDARY_TOL)?;
    let zeta = *report
        .zeros_boundary
        .first()
        .ok_or(WitnessError::NoBoundaryZero)?;
    let zeta = zeta / zeta.norm();
    let v0 = symbol.outer_modulus_at(C_ZERO)?;
    if lambda.norm() >= v0 {
        return Err(WitnessError::LambdaOutsideGuarantee {
            lambda: lambda.norm(),
            guarantee: v0,
        });
    }
    // |λ| < p < q < |v(0)|: q from the schedule fraction, p halfway down.
    let q = (schedule.birkhoff_fraction * v0).max(0.5 * (lambda.norm() + v0));
    let p = 0.5 * (lambda.norm() + q);
    let kappa = space.kernel_exponent();
    let theta_eta = eta.arg();
    let theta_zeta = zeta.arg();

    let mut stages = Vec::new();
    let mut exhausted = false;
    for j in 0..schedule.stages {
        let delta0 = 0.35 * 0.5f64.powi(j as i32);
        // Scan for an angle with a certified Birkhoff product.
        let mut found = None;
        'scan: for t in 0..schedule.scan_candidates {
            let delta = delta0 * (1.0 + 0.05 * t as f64);
            let theta_j = theta_zeta + delta;
            let n_min = 6 * (j + 1);
            let mut log_prod = 0.0f64;
            for n in 1..=schedule.max_orbit {
                let angle = theta_j - n as f64 * theta_eta;
                let val = symbol
                    .evaluate(Complex64::from_polar(1.0, angle))?
                    .norm();
                if val == 0.0 {
                    continue 'scan;
                }
                log_prod += val.ln();
                if n >= n_min && log_prod > n as f64 * q.ln() {
                    found = Some((theta_j, n));
                    break 'scan;
                }
            }
        }
        let Some((theta_j, n_j)) = found else {
            exhausted = true;
            break;
        };

        // Radius scan: certified product at radius r, plus the Blaschke
        // guard |B(z_j)| > 1/2.
        let zero_moduli: Vec<f64> = report
            .zeros_inside
            .iter()
            .map(|z| z.norm())
            .collect();
        let mut picked = None;
        for m in (j as i32 + 2)..48 {
            let r = 1.0 - 0.5f64.powi(m);
            if zero_moduli.iter().any(|zm| (zm - r).abs() < 1e-9) {
                continue;
            }
            let mut log_prod = 0.0f64;
            let mut ok = true;
            for k in 1..=n_j {
                let z = Complex64::from_polar(r, theta_j - k as f64 * theta_eta);
                let val = symbol.evaluate(z)?.norm();
                if val == 0.0 {
                    ok = false;
                    break;
                }
                log_prod += val.ln();
            }
            if !ok || log_prod <= n_j as f64 * p.ln() {
                continue;
            }
            let guard = boundary_blaschke_guard(r, theta_j, theta_eta, n_j);
            if guard > 0.5 {
                picked = Some((r, guard));
                break;
            }
        }
        let Some((r_j, guard)) = picked else {
            exhausted = true;
            break;
        };

        let z_j = Complex64::from_polar(r_j, theta_j);
        // h = K_{z_j} + Σ λ^k u_k K_{η̄^k z_j}, u_k = (Π conj(ψ(η̄^s z_j)))⁻¹,
        // built by the bounded ratio c_k = c_{k-1}·λ/conj(ψ(η̄^k z_j)).
        let mut coeffs = vec![C_ONE];
        let mut points = vec![z_j];
        let mut carry = C_ONE;
        for k in 1..=n_j {
            let zk = Complex64::from_polar(r_j, theta_j - k as f64 * theta_eta);
            carry *= lambda / symbol.evaluate(zk)?.conj();
            coeffs.push(carry);
            points.push(zk);
        }
        let norm = rotation_gram_norm(&coeffs, eta, r_j, kappa, RotationDirection::Backward);
        // Residual: conj(ψ(z_j)) K_{η z_j} - λ^{n+1} u_n K_{η̄^n z_j};
        // the top coefficient is λ·c_{n_j}.
        let front = symbol.evaluate(z_j)?.conj();
        let back = lambda * coeffs[n_j];
        let raw = two_kernel_norm(
            space,
            front,
            Complex64::from_polar(r_j, theta_j + theta_eta),
            -back,
            points[n_j],
        );
        let floor = guard * space.kernel_norm(z_j);
        let bound = 2.0 * symbol.evaluate(z_j)?.norm()
            + 2.0 * lambda.norm().powi(n_j as i32 + 1) / p.powi(n_j as i32);

        let combination = KernelCombination::new(
            space,
            coeffs.iter().copied().zip(points.iter().copied()).collect(),
        )
        .map_err(|_| WitnessError::OutsideDisk)?;
        stages.push(WitnessStage {
            index: j,
            orbit_len: n_j + 1,
            lambda,
            base_point: z_j,
            combination,
            norm,
            floor,
            raw_residual_norm: raw,
            residual: raw / norm,
            bound,
        });
    }
    Ok(WitnessRun {
        construction: Construction::EllipticBoundaryZero,
        lambda,
        guarantee: Some(v0),
        stages,
        schedule_exhausted: exhausted,
    })
}

/// `|B(z_j)| = Π_{k=1}^{n} d(z_j, η̄^k z_j)` for the Blaschke product with
/// zeros along the rotated circle of the same radius.
fn boundary_blaschke_guard(r: f64, theta: f64, theta_eta: f64, n: usize) -> f64 {
    let z = Complex64::from_polar(r, theta);
    let mut log_prod = 0.0f64;
    for k in 1..=n {
        let w = Complex64::from_polar(r, theta - k as f64 * theta_eta);
        let d = ((z - w) / (C_ONE - w.conj() * z)).norm();
        if d == 0.0 {
            return 0.0;
        }
        log_prod += d.ln();
    }
    log_prod.exp()
}

enum RotationDirection {
    Forward,
    Backward,
}

/// `‖Σ_k c_k K_{w_k}‖` for points `w_k = η^{±k} z` on one circle: the Gram
/// is Toeplitz, `⟨K_{w_a}, K_{w_b}⟩ = (1 - η^{±(a-b)} r²)^{-κ}`.
fn rotation_gram_norm(
    coeffs: &[Complex64],
    eta: Complex64,
    r: f64,
    kappa: f64,
    direction: RotationDirection,
) -> f64 {
    let n = coeffs.len();
    let sign = match direction {
        RotationDirection::Forward => -1.0,
        RotationDirection::Backward => 1.0,
    };
    let theta = sign * eta.arg();
    // G(d) = (1 - e^{i d θ} r²)^{-κ} for d = a - b ∈ [-(n-1), n-1]
    let mut g = vec![C_ZERO; 2 * n - 1];
    for (i, slot) in g.iter_mut().enumerate() {
        let d = i as f64 - (n as f64 - 1.0);
        let base = C_ONE - Complex64::from_polar(r * r, d * theta);
        *slot = (-kappa * base.ln()).exp();
    }
    let mut acc = 0.0f64;
    for (a, ca) in coeffs.iter().enumerate() {
        for (b, cb) in coeffs.iter().enumerate() {
            let idx = (a as i64 - b as i64 + n as i64 - 1) as usize;
            acc += (ca * cb.conj() * g[idx]).re;
        }
    }
    acc.max(0.0).sqrt()
}

/// `‖x K_{w1} + y K_{w2}‖` directly from three kernel evaluations.
fn two_kernel_norm(
    space: SpaceSpec,
    x: Complex64,
    w1: Complex64,
    y: Complex64,
    w2: Complex64,
) -> f64 {
    let k11 = space.kernel_norm(w1).powi(2);
    let k22 = space.kernel_norm(w2).powi(2);
    let k12 = space.kernel_eval(w1, w2).expect("interior points");
    let sq = x.norm_sqr() * k11 + y.norm_sqr() * k22 + 2.0 * (x * y.conj() * k12).re;
    sq.max(0.0).sqrt()
}

fn rotation_multiplier(map: &MobiusMap) -> Result<Complex64, WitnessError> {
    let cls = map.classify()?;
    if cls.kind != Kind::EllipticIrrational || cls.fixed_points[0].norm() > 1e-9 {
        return Err(WitnessError::NotIrrationalRotation);
    }
    Ok(cls.multiplier)
}

/// Level-circle construction: along recurrence times `n_j` of the rotation,
/// λ is selected among the `n_j`-th roots of `P_{n_j} = Π conj(ψ(η^k z₀))`
/// by maximal witness norm; `|λ|` tends to `Δ_ψ(r₀)` and the two-term
/// residual decays as `η^{n_j} z₀` returns to `z₀`.
pub fn witness_level_circle(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    r0: f64,
    schedule: &WitnessSchedule,
) -> Result<WitnessRun, WitnessError> {
    if !(0.0 < r0 && r0 < 1.0) {
        return Err(WitnessError::OutsideDisk);
    }
    let eta = rotation_multiplier(map)?;
    let times = mobius::return_times(eta, schedule.stages + 4)
        .map_err(|_| WitnessError::ReturnTimesUnavailable)?;
    let times: Vec<u64> = times
        .into_iter()
        .filter(|&n| n >= 2 && n <= schedule.max_orbit as u64)
        .collect();
    let kappa = space.kernel_exponent();
    let theta_eta = eta.arg();
    let target = symbol.jensen_delta(r0)?;

    // Scan for a base point with certified Birkhoff products over the
    // deepest recurrence window.
    let n_check = *times.last().ok_or(WitnessError::ReturnTimesUnavailable)? as usize;
    let mut best: Option<(f64, f64)> = None;
    'candidates: for t in 0..schedule.scan_candidates {
        let theta0 = 2.0 * std::f64::consts::PI * (t as f64 + 0.31) / schedule.scan_candidates as f64;
        let mut log_sum = 0.0f64;
        for k in 0..n_check {
            let z = Complex64::from_polar(r0, theta0 + k as f64 * theta_eta);
            let v = symbol.evaluate(z)?.norm();
            if v < 1e-13 {
                continue 'candidates;
            }
            log_sum += v.ln();
        }
        let dev = (log_sum / n_check as f64 - target.ln()).abs();
        if best.map(|(d, _)| dev < d).unwrap_or(true) {
            best = Some((dev, theta0));
        }
    }
    let (_, theta0) = best.ok_or(WitnessError::ZeroOnOrbit)?;
    let z0 = Complex64::from_polar(r0, theta0);

    let mut stages = Vec::new();
    let mut last_lambda = C_ZERO;
    for (index, &n) in times.iter().enumerate() {
        let n = n as usize;
        // Accumulate log|ψ| and arg along the orbit; P_n itself underflows
        // for deep recurrence times, its n-th roots do not.
        let mut log_mods = Vec::with_capacity(n + 1);
        let mut args = Vec::with_capacity(n + 1);
        log_mods.push(0.0f64);
        args.push(0.0f64);
        let (mut lm, mut ar) = (0.0f64, 0.0f64);
        for k in 0..n {
            let z = Complex64::from_polar(r0, theta0 + k as f64 * theta_eta);
            let v = symbol.evaluate(z)?.conj();
            lm += v.norm().ln();
            ar += v.arg();
            log_mods.push(lm);
            args.push(ar);
        }
        let lambda0 = Complex64::from_polar((lm / n as f64).exp(), ar / n as f64);
        // Coefficients for λ_m = λ₀ ω^m: c_s^{(m)} = A_s ω^{-ms}, with
        // A_s = p_s/λ₀^s of bounded log-modulus (Birkhoff deviations).
        // Select m maximizing the Gram norm via the Toeplitz autocorrelation.
        let mut a = Vec::with_capacity(n);
        for s in 0..n {
            let log_mod = log_mods[s] - s as f64 * lm / n as f64;
            let arg = args[s] - s as f64 * ar / n as f64;
            a.push(Complex64::from_polar(log_mod.exp(), arg));
        }
        let m_best = select_root_by_max_norm(&a, eta, r0, kappa, n);
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m_best as f64 / n as f64);
        let lambda_m = lambda0 * omega;
        let mut coeffs = Vec::with_capacity(n);
        let mut om_pow = C_ONE;
        for s in 0..n {
            coeffs.push(a[s] * om_pow.conj());
            om_pow *= omega;
        }
        let points: Vec<Complex64> = (0..n)
            .map(|s| Complex64::from_polar(r0, theta0 + s as f64 * theta_eta))
            .collect();
        let norm = rotation_gram_norm(&coeffs, eta, r0, kappa, RotationDirection::Forward);
        // Exact residual: λ_m (K_{η^n z₀} - K_{z₀}).
        let z_return = Complex64::from_polar(r0, theta0 + n as f64 * theta_eta);
        let raw = lambda_m.norm() * two_kernel_norm(space, C_ONE, z_return, -C_ONE, z0);
        let floor = space.kernel_norm(z0);
        let bound = raw; // the residual identity is exact for this scheme

        let combination = KernelCombination::new(
            space,
            coeffs.iter().copied().zip(points.iter().copied()).collect(),
        )
        .map_err(|_| WitnessError::OutsideDisk)?;
        last_lambda = lambda_m;
        stages.push(WitnessStage {
            index,
            orbit_len: n,
            lambda: lambda_m,
            base_point: z0,
            combination,
            norm,
            floor,
            raw_residual_norm: raw,
            residual: raw / norm,
            bound,
        });
    }
    Ok(WitnessRun {
        construction: Construction::EllipticLevelCircle,
        lambda: last_lambda,
        guarantee: Some(target),
        stages,
        schedule_exhausted: false,
    })
}

/// Among the `n` roots `λ_m = λ₀ ω^m`, pick the one maximizing
/// `‖h_m‖²  = Σ_d ω^{-md} [G(d)·R(d)]` with `R` the coefficient
/// autocorrelation; the averaging identity guarantees the best one is at
/// least `‖K_{z₀}‖`.
fn select_root_by_max_norm(a: &[Complex64], eta: Complex64, r: f64, kappa: f64, n: usize) -> usize {
    let theta = -eta.arg(); // forward-orbit Toeplitz symbol
    let mut gr = vec![C_ZERO; 2 * n - 1];
    for (i, slot) in gr.iter_mut().enumerate() {
        let d = i as i64 - (n as i64 - 1);
        let base = C_ONE - Complex64::from_polar(r * r, d as f64 * theta);
        let g = (-kappa * base.ln()).exp();
        // R(d) = Σ_b a_{b+d} conj(a_b)
        let mut rd = C_ZERO;
        let (lo, hi) = if d >= 0 {
            (0i64, n as i64 - d)
        } else {
            (-d, n as i64)
        };
        for b in lo..hi {
            rd += a[(b + d) as usize] * a[b as usize].conj();
        }
        *slot = g * rd;
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for m in 0..n {
        let mut q = 0.0f64;
        for (i, &v) in gr.iter().enumerate() {
            let d = i as i64 - (n as i64 - 1);
            let phase = Complex64::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI * (m as i64 * d) as f64 / n as f64,
            );
            q += (v * phase).re;
        }
        if q > best.1 {
            best = (m, q);
        }
    }
    best.0
}

/// Inner-zero variant of the level-circle scheme: stage points approach a
/// zero of ψ on the minimal zero circle `Γ_R`, λ runs over the grid
/// `λ_{n,m} = e^{2πim/(n+1)} t₀` with `t₀ < Δ_ψ(R)`, and the stage λ is
/// selected by maximal witness norm.
pub fn witness_inner_zero(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    t0: f64,
    schedule: &WitnessSchedule,
) -> Result<WitnessRun, WitnessError> {
    let eta = rotation_multiplier(map)?;
    let report = symbol.zero_report(crate::symbol::BOUNDARY_TOL)?;
    let zero = report
        .zeros_inside
        .first()
        .copied()
        .ok_or(WitnessError::NoUsableInnerZero)?;
    let r_inner = report.min_inner_radius;
    if r_inner < 1e-9 {
        // ψ(0) = 0 empties the admissible λ set for this scheme.
        return Err(WitnessError::NoUsableInnerZero);
    }
    let delta_r = symbol.jensen_delta(r_inner)?;
    if !(t0 > 0.0 && t0 < delta_r) {
        return Err(WitnessError::LambdaOutsideGuarantee {
            lambda: t0,
            guarantee: delta_r,
        });
    }
    let p = 0.5 * (t0 + delta_r);
    let kappa = space.kernel_exponent();
    let theta_eta = eta.arg();
    let theta_zero = zero.arg();
    let floor = space.kernel_norm(Complex64::from_polar(r_inner, theta_zero));

    let mut stages = Vec::new();
    let mut exhausted = false;
    let mut last_lambda = C_ZERO;
    for j in 0..schedule.stages {
        let delta0 = 0.3 * 0.5f64.powi(j as i32);
        let mut found = None;
        'scan: for t in 0..schedule.scan_candidates {
            let theta_j = theta_zero + delta0 * (1.0 + 0.05 * t as f64);
            let n_min = 6 * (j + 1);
            let mut log_prod = 0.0f64;
            for n in 1..=schedule.max_orbit {
                let z = Complex64::from_polar(r_inner, theta_j - n as f64 * theta_eta);
                let val = symbol.evaluate(z)?.norm();
                if val < 1e-13 {
                    continue 'scan;
                }
                log_prod += val.ln();
                if n >= n_min && log_prod > n as f64 * p.ln() {
                    found = Some((theta_j, n));
                    break 'scan;
                }
            }
        }
        let Some((theta_j, n_j)) = found else {
            exhausted = true;
            break;
        };
        let z_j = Complex64::from_polar(r_inner, theta_j);
        // u_k = (Π_{s=1}^k conj(ψ(η̄^s z_j)))⁻¹; A_k = t₀^k u_k built by the
        // bounded ratio A_k = A_{k-1}·t₀/conj(ψ); λ grid ω = e^{2πi/(n+1)}.
        let mut a = Vec::with_capacity(n_j + 1);
        a.push(C_ONE);
        let mut carry = C_ONE;
        for k in 1..=n_j {
            let zk = Complex64::from_polar(r_inner, theta_j - k as f64 * theta_eta);
            carry *= Complex64::new(t0, 0.0) / symbol.evaluate(zk)?.conj();
            a.push(carry);
        }
        let grid = n_j + 1;
        let m_best = select_grid_lambda(&a, eta, r_inner, kappa, grid);
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m_best as f64 / grid as f64);
        let lambda_m = Complex64::new(t0, 0.0) * omega;
        let mut coeffs = Vec::with_capacity(n_j + 1);
        let mut om_pow = C_ONE;
        for ak in a.iter() {
            coeffs.push(ak * om_pow);
            om_pow *= omega;
        }
        let points: Vec<Complex64> = (0..=n_j)
            .map(|k| Complex64::from_polar(r_inner, theta_j - k as f64 * theta_eta))
            .collect();
        let norm = rotation_gram_norm(&coeffs, eta, r_inner, kappa, RotationDirection::Backward);
        let front = symbol.evaluate(z_j)?.conj();
        let back = lambda_m * coeffs[n_j];
        let raw = two_kernel_norm(
            space,
            front,
            Complex64::from_polar(r_inner, theta_j + theta_eta),
            -back,
            points[n_j],
        );
        let bound = symbol.evaluate(z_j)?.norm() + t0.powi(n_j as i32 + 1) / p.powi(n_j as i32);
        let combination = KernelCombination::new(
            space,
            coeffs.iter().copied().zip(points.iter().copied()).collect(),
        )
        .map_err(|_| WitnessError::OutsideDisk)?;
        last_lambda = lambda_m;
        stages.push(WitnessStage {
            index: j,
            orbit_len: n_j + 1,
            lambda: lambda_m,
            base_point: z_j,
            combination,
            norm,
            floor,
            raw_residual_norm: raw,
            residual: raw / norm,
            bound,
        });
    }
    Ok(WitnessRun {
        construction: Construction::EllipticInnerZero,
        lambda: last_lambda,
        guarantee: Some(delta_r),
        stages,
        schedule_exhausted: exhausted,
    })
}

/// λ-grid selection for the inner-zero scheme: coefficients
/// `c_k^{(m)} = A_k ω^{mk}` over the backward-orbit Toeplitz Gram.
fn select_grid_lambda(a: &[Complex64], eta: Complex64, r: f64, kappa: f64, grid: usize) -> usize {
    let n = a.len();
    let theta = eta.arg(); // backward-orbit Toeplitz symbol
    let mut gr = vec![C_ZERO; 2 * n - 1];
    for (i, slot) in gr.iter_mut().enumerate() {
        let d = i as i64 - (n as i64 - 1);
        let base = C_ONE - Complex64::from_polar(r * r, d as f64 * theta);
        let g = (-kappa * base.ln()).exp();
        let mut rd = C_ZERO;
        let (lo, hi) = if d >= 0 {
            (0i64, n as i64 - d)
        } else {
            (-d, n as i64)
        };
        for b in lo..hi {
            rd += a[(b + d) as usize] * a[b as usize].conj();
        }
        *slot = g * rd;
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for m in 0..grid {
        let mut q = 0.0f64;
        for (i, &v) in gr.iter().enumerate() {
            let d = i as i64 - (n as i64 - 1);
            let phase = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (m as i64 * d) as f64 / grid as f64,
            );
            q += (v * phase).re;
        }
        if q > best.1 {
            best = (m, q);
        }
    }
    best.0
}
