//! vwslab: a numerical laboratory for fractional Schrödinger equations with
//! singular potentials.
//!
//! The equation under study is i∂ₜu + 𝓡ˢu + p(x)u = 0 on a homogeneous
//! group, where p may be as singular as δ or δ². Singular potentials are
//! handled as regularizing nets p_ε (the very-weak-solution framework): each
//! ε gives a classical problem, and the theory's content lives in how
//! solution norms scale as ε → 0. This crate provides
//!
//! - [`group`]: dilation weights, anisotropic dilations, homogeneous
//!   dimension Q for the abelian, Heisenberg and Engel presets;
//! - [`field`] / [`transform`]: periodic-box fields with physical norms and
//!   a Parseval-normalized FFT;
//! - [`spectral`]: (−Δ)ˢ as a spectral multiplier and the Sobolev norms;
//! - [`symbol`]: symbol-level spectra (Heisenberg harmonic oscillator,
//!   Engel anharmonic oscillator) and the decoupled mode equation;
//! - [`mollifier`]: Friedrichs mollifiers under anisotropic dilations and
//!   the ε-nets for δ, δ², mollified and shifted potentials;
//! - [`evolution`]: unitary split-step propagation with energy diagnostics;
//! - [`experiments`]: moderateness, uniqueness, consistency, a-priori and
//!   embedding checks, each reporting a serializable verdict.
//!
//! The PDE is discretized on the abelian preset only; the Heisenberg and
//! Engel presets feed the mollifier scaling engine and the symbol models.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod field;
pub mod fit;
pub mod group;
pub mod mollifier;
pub mod report;
pub mod spectral;
pub mod symbol;
pub mod transform;

pub use error::{Error, Result};
pub use evolution::{solve, solve_with_potential, SolverConfig, Scheme, Trajectory};
pub use field::{Field, Grid};
pub use group::GroupStructure;
pub use mollifier::{Mollifier, PotentialNet};
pub use spectral::FractionalOperator;
