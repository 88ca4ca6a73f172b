//! torsionlab: torsional rigidity on manifolds of revolution.
//!
//! The torsion function of a compact domain Ω is the solution of
//! `Δf = 1` in Ω, `f = 0` on ∂Ω (geometer's sign, Δ = -div grad), and the
//! torsional rigidity is the mean exit value
//!
//! ```text
//! E(Ω) = (2 ∫_Ω f - ∫_Ω |∇f|²) / Vol(Ω) = (1 / Vol(Ω)) ∫_Ω f .
//! ```
//!
//! The crate computes E(Ω) two ways, a quadrature-grade radial solver for
//! rotationally symmetric domains and a masked-grid finite-element solver
//! for arbitrary domains on 2-D surfaces of revolution, and layers on top
//! of them the machinery of comparison geometry: Schwarz symmetrization of
//! scalar fields, equal-volume ball comparisons on isoperimetric model
//! spaces, the model radius R(K, D) for Ricci/diameter-bounded manifolds,
//! and Cheeger-constant upper bounds with their sharpness family.

pub mod cheeger;
pub mod config;
pub mod fem;
pub mod manifold;
pub mod models;
pub mod quad;
pub mod radial;
pub mod report;
pub mod rng;
pub mod symmetrize;
pub mod verify;

pub use manifold::{ManifoldError, RevolutionManifold};
pub use radial::RadialTorsionSolution;
