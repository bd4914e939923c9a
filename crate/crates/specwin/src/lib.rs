//! Numerical laboratory for spectra of weighted composition operators
//! `C_{ψ,φ} f = ψ · (f ∘ φ)` on the Hardy space `H²(D)` and weighted Bergman
//! spaces `A²_α(D)`, where `φ` is an automorphism of the unit disk.
//!
//! The crate computes closed-form spectrum predictions for these operators
//! and cross-validates them three independent ways:
//!
//! * finite matrix truncations in the orthonormal monomial basis
//!   ([`truncation`]), with eigenvalues and pseudospectrum diagnostics;
//! * explicit approximate-eigenvector witnesses built from reproducing
//!   kernels along Möbius orbits ([`witness`]);
//! * ergodic averages and Jensen/Poisson quadrature for the radial
//!   level-circle function `Δ_ψ(r)` and outer-part modulus ([`symbol`]).
//!
//! Everything is pure and immutable; all public operations are safe to call
//! concurrently.

pub mod linalg;
pub mod mobius;
pub mod oracle;
pub mod poly;
pub mod space;
pub mod symbol;
pub mod truncation;
pub mod witness;

pub use num_complex::Complex64;

pub use mobius::{Classification, Kind, MobiusMap};
pub use oracle::{RadiusBound, SpectrumSet};
pub use space::{KernelCombination, SpaceSpec};
pub use symbol::{SymbolSpec, ZeroReport};
pub use truncation::TruncationMatrix;
pub use witness::WitnessRun;
