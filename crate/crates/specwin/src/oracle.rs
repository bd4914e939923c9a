//! Closed-form spectrum predictions for `C_{ψ,φ}`, dispatched on the
//! automorphism class of `φ` and the invertibility of the operator, plus
//! the spectral-radius bounds the predictions sharpen.
//!
//! Invertible cases reproduce the classical formulas (circle for elliptic
//! irrational and parabolic, annulus for hyperbolic); non-invertible cases
//! fill in the disk of the matching radius. Rational-rotation cases return
//! the sampled closure of the `n₀`-th-root set
//! `{λ : λ^{n₀} = ψ_{(n₀)}(z), z ∈ D}`.

use crate::mobius::{Kind, MobiusError, MobiusMap};
use crate::space::SpaceSpec;
use crate::symbol::{SymbolError, SymbolSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no radius bound formula for this automorphism kind; use the spectrum prediction")]
    UnsupportedKind,
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Polar sampling grid for closure-of-image spectra. Radii accumulate
/// geometrically toward the boundary, where `ψ_{(n₀)}` attains its sup.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub radii: usize,
    pub angles: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            radii: 64,
            angles: 256,
        }
    }
}

impl SamplingSpec {
    pub fn grid_points(&self) -> Vec<Complex64> {
        let r_first = 0.02;
        let r_last = 0.998;
        let gamma = ((1.0 - r_last) / (1.0 - r_first) as f64).powf(1.0 / (self.radii - 1) as f64);
        let mut pts = Vec::with_capacity(self.radii * self.angles);
        let mut gap = 1.0 - r_first;
        for _ in 0..self.radii {
            let r = 1.0 - gap;
            for j in 0..self.angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / self.angles as f64;
                pts.push(Complex64::from_polar(r, theta));
            }
            gap *= gamma;
        }
        pts
    }
}

/// Geometric shape of a predicted spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Shape {
    Disk { radius: f64 },
    Circle { radius: f64 },
    Annulus { r_min: f64, r_max: f64 },
    /// Finite sample of a set closed under multiplication by the `n0`-th
    /// roots of unity; the prediction is the closure of the full set.
    SampledClosure { points: Vec<Complex64>, n0: u32 },
}

/// Which dispatch case produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumCase {
    EllipticIrrationalCircle,
    EllipticIrrationalDisk,
    EllipticRationalClosure,
    ParabolicCircle,
    ParabolicDisk,
    HyperbolicAnnulus,
    HyperbolicDisk,
    IdentityMultiplierClosure,
}

impl SpectrumCase {
    /// Invertible-operator cases restate classical results; the
    /// non-invertible ones are the sharpened spectra this library targets.
    pub fn from_invertible_theory(&self) -> bool {
        matches!(
            self,
            SpectrumCase::EllipticIrrationalCircle
                | SpectrumCase::ParabolicCircle
                | SpectrumCase::HyperbolicAnnulus
        )
    }
}

/// Inputs echoed alongside every prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub case: SpectrumCase,
    pub map_kind: Kind,
    pub invertible: bool,
    pub space: SpaceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub shape: Shape,
    pub provenance: Provenance,
}

impl SpectrumSet {
    /// Outer radius of the predicted set (max modulus over samples for
    /// closures).
    pub fn outer_radius(&self) -> f64 {
        match &self.shape {
            Shape::Disk { radius } | Shape::Circle { radius } => *radius,
            Shape::Annulus { r_max, .. } => *r_max,
            Shape::SampledClosure { points, .. } => {
                points.iter().map(|p| p.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Set membership up to a metric tolerance (`SampledClosure` uses
    /// distance to the nearest sample).
    pub fn contains(&self, lambda: Complex64, tol: f64) -> bool {
        let m = lambda.norm();
        match &self.shape {
            Shape::Disk { radius } => m <= radius + tol,
            Shape::Circle { radius } => (m - radius).abs() <= tol,
            Shape::Annulus { r_min, r_max } => m >= r_min - tol && m <= r_max + tol,
            Shape::SampledClosure { points, .. } => {
                points.iter().any(|p| (p - lambda).norm() <= tol)
            }
        }
    }
}

/// Spectral-radius upper bound, by automorphism kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RadiusBoundKind {
    /// Elliptic irrational: outer-part modulus at the interior fixed point.
    EllipticOuter { outer_modulus: f64 },
    /// Parabolic: weight modulus at the Denjoy-Wolff point.
    ParabolicWeightAtDw { weight_modulus: f64 },
    /// Hyperbolic: larger of the two fixed-point quantities
    /// `|ψ(p)| φ'(p)^{-e}` with `e` the half kernel exponent.
    HyperbolicMax { at_denjoy_wolff: f64, at_other: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusBound {
    pub value: f64,
    pub kind: RadiusBoundKind,
}

/// `|ψ(p)| φ'(p)^{-e}` at a boundary fixed point, `e` = half the kernel
/// exponent (1/2 on Hardy, (α+2)/2 on Bergman).
fn fixed_point_quantity(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    p: Complex64,
) -> Result<f64, OracleError> {
    // Project numerically-boundary fixed points onto the circle before
    // evaluating; the symbol class is continuous up to the boundary.
    let p = if p.norm() > 1.0 { p / p.norm() } else { p };
    let weight = symbol.evaluate(p)?.norm();
    let deriv = map.derivative(p)?.norm();
    let e = space.kernel_exponent() / 2.0;
    Ok(weight * deriv.powf(-e))
}

/// Upper bound for the spectral radius of `C_{ψ,φ}`.
///
/// Elliptic irrational: `|v(a)|` (outer part at the fixed point); parabolic:
/// `|ψ(a)|`; hyperbolic: `max{|ψ(a)|φ'(a)^{-e}, |ψ(b)|φ'(b)^{-e}}`. Rational
/// rotations have no single-radius formula — use [`predict_spectrum`].
pub fn spectral_radius_bound(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
) -> Result<RadiusBound, OracleError> {
    let cls = map.classify()?;
    match cls.kind {
        Kind::EllipticIrrational => {
            let a = cls.fixed_points[0];
            let outer = symbol.outer_modulus_at(a)?;
            Ok(RadiusBound {
                value: outer,
                kind: RadiusBoundKind::EllipticOuter {
                    outer_modulus: outer,
                },
            })
        }
        Kind::Parabolic => {
            let a = cls.denjoy_wolff.expect("parabolic has a Denjoy-Wolff point");
            let a = a / a.norm();
            let w = symbol.evaluate(a)?.norm();
            Ok(RadiusBound {
                value: w,
                kind: RadiusBoundKind::ParabolicWeightAtDw { weight_modulus: w },
            })
        }
        Kind::Hyperbolic => {
            let a = cls.fixed_points[0];
            let b = cls.fixed_points[1];
            let qa = fixed_point_quantity(symbol, map, space, a)?;
            let qb = fixed_point_quantity(symbol, map, space, b)?;
            Ok(RadiusBound {
                value: qa.max(qb),
                kind: RadiusBoundKind::HyperbolicMax {
                    at_denjoy_wolff: qa,
                    at_other: qb,
                },
            })
        }
        Kind::Identity | Kind::EllipticRational(_) => Err(OracleError::UnsupportedKind),
    }
}

/// `C_{ψ,φ}` is invertible iff both `ψ` and `1/ψ` are bounded (φ being an
/// automorphism); within this symbol class that is the zero-free criterion.
pub fn is_invertible_operator(symbol: &SymbolSpec, _map: &MobiusMap) -> bool {
    symbol.is_invertible_weight()
}

/// The predicted spectrum of `C_{ψ,φ}` on the given space.
pub fn predict_spectrum(
    symbol: &SymbolSpec,
    map: &MobiusMap,
    space: SpaceSpec,
    sampling: SamplingSpec,
) -> Result<SpectrumSet, OracleError> {
    let cls = map.classify()?;
    let invertible = is_invertible_operator(symbol, map);
    let provenance = |case| Provenance {
        case,
        map_kind: cls.kind,
        invertible,
        space,
    };

    match cls.kind {
        Kind::Identity => {
            // Multiplication operator: the spectrum is the closure of ψ(D).
            let points: Vec<Complex64> = sampling
                .grid_points()
                .into_iter()
                .filter_map(|z| symbol.evaluate(z).ok())
                .collect();
            Ok(SpectrumSet {
                shape: Shape::SampledClosure { points, n0: 1 },
                provenance: provenance(SpectrumCase::IdentityMultiplierClosure),
            })
        }
        Kind::EllipticRational(n0) => {
            let mut points = Vec::with_capacity(sampling.radii * sampling.angles * n0 as usize);
            for z in sampling.grid_points() {
                let p = symbol.cocycle(map, n0 as u64, z)?;
                let modulus = p.norm().powf(1.0 / n0 as f64);
                let base_arg = p.arg() / n0 as f64;
                for j in 0..n0 {
                    let arg = base_arg + 2.0 * std::f64::consts::PI * j as f64 / n0 as f64;
                    points.push(Complex64::from_polar(modulus, arg));
                }
            }
            Ok(SpectrumSet {
                shape: Shape::SampledClosure { points, n0 },
                provenance: provenance(SpectrumCase::EllipticRationalClosure),
            })
        }
        Kind::EllipticIrrational => {
            let a = cls.fixed_points[0];
            if invertible {
                let radius = symbol.evaluate(a)?.norm();
                Ok(SpectrumSet {
                    shape: Shape::Circle { radius },
                    provenance: provenance(SpectrumCase::EllipticIrrationalCircle),
                })
            } else {
                let radius = symbol.outer_modulus_at(a)?;
                Ok(SpectrumSet {
                    shape: Shape::Disk { radius },
                    provenance: provenance(SpectrumCase::EllipticIrrationalDisk),
                })
            }
        }
        Kind::Parabolic => {
            let a = cls.denjoy_wolff.expect("parabolic has a Denjoy-Wolff point");
            let radius = symbol.evaluate(a / a.norm())?.norm();
            if invertible {
                Ok(SpectrumSet {
                    shape: Shape::Circle { radius },
                    provenance: provenance(SpectrumCase::ParabolicCircle),
                })
            } else {
                Ok(SpectrumSet {
                    shape: Shape::Disk { radius },
                    provenance: provenance(SpectrumCase::ParabolicDisk),
                })
            }
        }
        Kind::Hyperbolic => {
            let qa = fixed_point_quantity(symbol, map, space, cls.fixed_points[0])?;
            let qb = fixed_point_quantity(symbol, map, space, cls.fixed_points[1])?;
            if invertible {
                Ok(SpectrumSet {
                    shape: Shape::Annulus {
                        r_min: qa.min(qb),
                        r_max: qa.max(qb),
                    },
                    provenance: provenance(SpectrumCase::HyperbolicAnnulus),
                })
            } else {
                Ok(SpectrumSet {
                    shape: Shape::Disk { radius: qa.max(qb) },
                    provenance: provenance(SpectrumCase::HyperbolicDisk),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_symbol() -> SymbolSpec {
        SymbolSpec::polynomial(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    fn z_minus_half() -> SymbolSpec {
        SymbolSpec::polynomial(&[c(-0.5, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn golden_table_parabolic_disk() {
        let m = MobiusMap::parabolic_cayley(1).unwrap();
        let sp = predict_spectrum(&z_minus_half(), &m, SpaceSpec::Hardy, SamplingSpec::default())
            .unwrap();
        match sp.shape {
            Shape::Disk { radius } => assert!((radius - 0.5).abs() < 1e-10),
            ref s => panic!("expected a disk, got {s:?}"),
        }
        assert_eq!(sp.provenance.case, SpectrumCase::ParabolicDisk);
        assert!(!sp.provenance.case.from_invertible_theory());
    }

    #[test]
    fn golden_table_hyperbolic_disk() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let sp =
            predict_spectrum(&z_symbol(), &m, SpaceSpec::Hardy, SamplingSpec::default()).unwrap();
        match sp.shape {
            Shape::Disk { radius } => assert!((radius - 3.0f64.sqrt()).abs() < 1e-10),
            ref s => panic!("expected a disk, got {s:?}"),
        }
    }

    #[test]
    fn golden_table_invertible_annulus() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let one = SymbolSpec::constant(c(1.0, 0.0)).unwrap();
        let sp = predict_spectrum(&one, &m, SpaceSpec::Hardy, SamplingSpec::default()).unwrap();
        match sp.shape {
            Shape::Annulus { r_min, r_max } => {
                assert!((r_min - 1.0 / 3.0f64.sqrt()).abs() < 1e-10);
                assert!((r_max - 3.0f64.sqrt()).abs() < 1e-10);
            }
            ref s => panic!("expected an annulus, got {s:?}"),
        }
        assert!(sp.provenance.case.from_invertible_theory());
    }

    #[test]
    fn golden_table_rational_rotation_closure() {
        // ψ(z) = z, φ(z) = -z: λ² = -z², closure = closed unit disk.
        let m = MobiusMap::rotation(0.5);
        let sp =
            predict_spectrum(&z_symbol(), &m, SpaceSpec::Hardy, SamplingSpec::default()).unwrap();
        match &sp.shape {
            Shape::SampledClosure { points, n0 } => {
                assert_eq!(*n0, 2);
                let max_mod = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
                assert!(max_mod <= 1.0 + 1e-9 && max_mod > 0.99);
                // membership samples of the closed unit disk
                assert!(sp.contains(c(0.5, 0.3), 1e-2));
                assert!(sp.contains(c(0.0, 0.9), 1e-2));
                assert!(!sp.contains(c(1.5, 0.0), 1e-2));
            }
            s => panic!("expected a sampled closure, got {s:?}"),
        }
    }

    #[test]
    fn sampled_closure_has_root_of_unity_symmetry() {
        let m = MobiusMap::rotation(0.25); // n0 = 4
        let sp = predict_spectrum(
            &z_minus_half(),
            &m,
            SpaceSpec::Hardy,
            SamplingSpec {
                radii: 4,
                angles: 8,
            },
        )
        .unwrap();
        if let Shape::SampledClosure { points, n0 } = &sp.shape {
            assert_eq!(*n0, 4);
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 4.0);
            // every point's rotation by ω is also a sample (exact root emission)
            for chunk in points.chunks(4) {
                for j in 0..4 {
                    let rotated = chunk[j] * omega;
                    let next = chunk[(j + 1) % 4];
                    assert!((rotated - next).norm() < 1e-12);
                }
            }
        } else {
            panic!("expected a sampled closure");
        }
    }

    #[test]
    fn radius_bound_examples() {
        let hyper = MobiusMap::hyperbolic_r(0.5).unwrap();
        let b = spectral_radius_bound(&z_symbol(), &hyper, SpaceSpec::Hardy).unwrap();
        assert!((b.value - 3.0f64.sqrt()).abs() < 1e-10);
        match b.kind {
            RadiusBoundKind::HyperbolicMax {
                at_denjoy_wolff,
                at_other,
            } => {
                assert!((at_denjoy_wolff - 3.0f64.sqrt()).abs() < 1e-10);
                assert!((at_other - 1.0 / 3.0f64.sqrt()).abs() < 1e-10);
            }
            ref k => panic!("wrong kind {k:?}"),
        }

        let para = MobiusMap::parabolic_cayley(1).unwrap();
        let b = spectral_radius_bound(&z_minus_half(), &para, SpaceSpec::Hardy).unwrap();
        assert!((b.value - 0.5).abs() < 1e-10);

        let b = spectral_radius_bound(&z_symbol(), &hyper, SpaceSpec::bergman(0.0).unwrap())
            .unwrap();
        assert!((b.value - 3.0).abs() < 1e-10);

        assert!(matches!(
            spectral_radius_bound(&z_symbol(), &MobiusMap::rotation(0.25), SpaceSpec::Hardy),
            Err(OracleError::UnsupportedKind)
        ));
    }

    #[test]
    fn invertibility_examples() {
        let m = MobiusMap::rotation(0.1);
        let plus_two = SymbolSpec::polynomial(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(is_invertible_operator(&plus_two, &m));
        assert!(!is_invertible_operator(&z_minus_half(), &m));
        let boundary_zero = SymbolSpec::polynomial(&[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!is_invertible_operator(&boundary_zero, &m));
    }

    #[test]
    fn non_invertible_radius_matches_bound() {
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        let cases: Vec<(SymbolSpec, MobiusMap, SpaceSpec)> = vec![
            (
                z_minus_half(),
                MobiusMap::parabolic_cayley(1).unwrap(),
                SpaceSpec::Hardy,
            ),
            (
                z_symbol(),
                MobiusMap::hyperbolic_r(0.5).unwrap(),
                SpaceSpec::Hardy,
            ),
            (
                z_symbol(),
                MobiusMap::hyperbolic_r(0.5).unwrap(),
                SpaceSpec::bergman(0.0).unwrap(),
            ),
            (z_minus_half(), MobiusMap::rotation(golden), SpaceSpec::Hardy),
        ];
        for (s, m, sp) in cases {
            let spec = predict_spectrum(&s, &m, sp, SamplingSpec::default()).unwrap();
            let bound = spectral_radius_bound(&s, &m, sp).unwrap();
            assert!(
                (spec.outer_radius() - bound.value).abs() < 1e-10,
                "radius {} vs bound {}",
                spec.outer_radius(),
                bound.value
            );
        }
    }

    #[test]
    fn elliptic_prediction_is_conjugation_invariant() {
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        let a = c(0.3, -0.2);
        let g = MobiusMap::exchange_with_zero(a);
        let rot = MobiusMap::rotation(golden);
        // φ with fixed point a, conjugate to the golden rotation
        let phi = g.compose(&rot).compose(&g);
        let psi = z_minus_half();
        let psi_conj = psi.compose_with_map(&g).unwrap();

        let direct = predict_spectrum(&psi, &phi, SpaceSpec::Hardy, SamplingSpec::default())
            .unwrap()
            .outer_radius();
        let conjugated = predict_spectrum(&psi_conj, &rot, SpaceSpec::Hardy, SamplingSpec::default())
            .unwrap()
            .outer_radius();
        assert!(
            (direct - conjugated).abs() < 1e-8,
            "{direct} vs {conjugated}"
        );
    }

    #[test]
    fn bergman_radius_dominates_hardy_for_contracting_dw() {
        let m = MobiusMap::hyperbolic_r(0.5).unwrap();
        let hardy = predict_spectrum(&z_symbol(), &m, SpaceSpec::Hardy, SamplingSpec::default())
            .unwrap()
            .outer_radius();
        let bergman = predict_spectrum(
            &z_symbol(),
            &m,
            SpaceSpec::bergman(0.0).unwrap(),
            SamplingSpec::default(),
        )
        .unwrap()
        .outer_radius();
        assert!(bergman >= hardy);
        assert!((bergman - 3.0).abs() < 1e-10 && (hardy - 3.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn identity_map_routes_to_multiplier_closure() {
        let sp = predict_spectrum(
            &z_minus_half(),
            &MobiusMap::identity(),
            SpaceSpec::Hardy,
            SamplingSpec::default(),
        )
        .unwrap();
        match &sp.shape {
            Shape::SampledClosure { points, n0 } => {
                assert_eq!(*n0, 1);
                // closure of ψ(D) = disk of radius 1/2 centered at -1/2… sampled
                assert!(sp.contains(c(-0.5, 0.0), 1e-2));
                assert!(sp.contains(c(0.4, 0.0), 2e-2));
                assert!(!points.is_empty());
            }
            s => panic!("expected closure, got {s:?}"),
        }
        assert_eq!(sp.provenance.case, SpectrumCase::IdentityMultiplierClosure);
    }
}
