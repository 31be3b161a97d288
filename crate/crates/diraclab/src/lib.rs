//! # diraclab
//!
//! A numerical laboratory for one-dimensional Schrödinger flows whose initial
//! data is a point mass (a Dirac delta) plus a perturbation.
//!
//! The crate has two coupled halves:
//!
//! * **Analytic/spectral half** — closed-form self-similar solutions emanating
//!   from `a·δ₀`, the exact symmetry transforms that fix them (Galilean boosts,
//!   the pseudo-conformal time inversion `t ↦ 1/t`), a Strang split-step
//!   pseudospectral integrator for the perturbation equations written around
//!   those solutions (and around the constant background of Gross–Pitaevskii),
//!   conservation-law diagnostics (mass/energy ledgers with quadrature-exact
//!   residuals), and scattering surrogates (wave-operator profiles, dyadic
//!   Cauchy tails, small-time reconstruction residuals).
//!
//! * **Geometric half** — the vortex-filament picture: curvature/torsion
//!   profiles `c = c₀/√t`, `τ = x/2t`, the Hasimoto map into a Schrödinger
//!   unknown, Frenet frame integration and curve reconstruction in Euclidean
//!   and Minkowski signatures, binormal-flow velocity, the conserved
//!   indicatrix quadratic form, and corner-tangent extrapolation as `t ↓ 0`.
//!
//! The primary interface is the [`examples`](https://doc.rust-lang.org/cargo/guide/project-layout.html)
//! directory — one runnable program per capability — plus a thin `diraclab`
//! binary that drives named experiment scenarios with CSV/JSON output.
//!
//! ## Conventions
//!
//! * Spatial grids are uniform and periodic on `[-L, L)` with `n` a power of
//!   two; nodes are `x_j = -L + 2Lj/n`, Fourier frequencies `ξ_k = πk/L`.
//! * All quadratures are the rectangle rule on the grid (spectrally accurate
//!   for smooth periodic integrands); norms written `‖·‖₂` are discrete `L²`
//!   norms with the `2L/n` weight.
//! * The integrator is deterministic: identical inputs produce bit-identical
//!   trajectories, CSV files, and manifests (wall-clock timing excepted).

pub mod cli;
pub mod closed_forms;
pub mod diagnostics;
pub mod filament;
pub mod scattering;
pub mod solver;

pub use closed_forms::{GalileanBoost, SelfSimilarParams, Sign};
pub use solver::{EquationSpec, Family, FieldState, SpatialGrid, TimeMesh, Trajectory};
