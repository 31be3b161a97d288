//! Vortex-filament geometry: curvature/torsion profiles, the Hasimoto bridge
//! to the Schrödinger side, Frenet reconstruction of curves in Euclidean and
//! Minkowski signatures, binormal-flow velocity, and corner-tangent
//! estimation.
//!
//! Curves live on the arclength interval `[-L, L]` carried by a
//! [`SpatialGrid`]; reconstructed curves materialize the right endpoint, so a
//! [`Curve3`] holds `n + 1` points. The Minkowski signature uses
//! `𝔄₋ = diag(1, 1, -1)`; its unit tangents are timelike
//! (`⟨T,T⟩₋ = -1`, the hyperboloid model), normals and binormals spacelike.

mod frenet;
mod profile;

pub use frenet::{binormal_velocity, reconstruct_curve, sm_invariant};
pub use profile::{
    corner_tangents, hasimoto, phase_locked_times, self_similar_profile, CornerEstimate,
    CornerSample, CORNER_SPREAD_TOL,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::SpatialGrid;

/// Errors from the geometric operators.
#[derive(Debug, Error)]
pub enum FilamentError {
    #[error("profile has {got} samples but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("curvature must be non-negative, got {value} at index {index}")]
    NegativeCurvature { index: usize, value: f64 },
    #[error("seed frame deviates from metric orthonormality by {0:.3e}")]
    SeedNotOrthonormal(f64),
    #[error("frame degenerated near x = {x}: {what}")]
    FrameDegeneracy { x: f64, what: String },
    #[error("time must be positive and finite, got {0}")]
    NonPositiveTime(f64),
    #[error("need at least {need} strictly decreasing positive times, got {got} usable")]
    BadTimeSequence { need: usize, got: usize },
    #[error("curve under-resolved near node {index}: tangent turns {angle:.3} rad in one step")]
    UnderResolved { index: usize, angle: f64 },
    #[error("corner extrapolation did not converge: leave-one-out spread {spread:.3e}")]
    NonConvergent { spread: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Componentwise 3-vector helpers shared by the geometry code.
pub(crate) mod v3 {
    pub fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    /// Plain Euclidean norm (used for coordinate gaps and spreads even in
    /// the Minkowski signature).
    pub fn norm(a: [f64; 3]) -> f64 {
        (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
    }

    pub fn is_finite(a: [f64; 3]) -> bool {
        a.iter().all(|v| v.is_finite())
    }
}

/// Signature selector: the bilinear form `⟨u, v⟩ = u·𝔄± v` with
/// `𝔄± = diag(1, 1, ±1)`, and the twisted cross product `u ∧± v = 𝔄±(u × v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSign {
    Euclidean,
    Minkowski,
}

impl MetricSign {
    fn third_axis(self) -> f64 {
        match self {
            MetricSign::Euclidean => 1.0,
            MetricSign::Minkowski => -1.0,
        }
    }

    /// `⟨u, v⟩` in the chosen signature.
    pub fn inner(self, u: [f64; 3], v: [f64; 3]) -> f64 {
        u[0] * v[0] + u[1] * v[1] + self.third_axis() * u[2] * v[2]
    }

    /// `u ∧± v = 𝔄±(u × v)`.
    pub fn cross_twisted(self, u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
        let c = v3::cross(u, v);
        [c[0], c[1], self.third_axis() * c[2]]
    }

    /// `⟨T, T⟩` of a unit tangent: +1 on the sphere, -1 on the hyperboloid
    /// (tangents are timelike in the Minkowski signature).
    pub fn tangent_square(self) -> f64 {
        self.third_axis()
    }
}

impl std::fmt::Display for MetricSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricSign::Euclidean => write!(f, "euclidean"),
            MetricSign::Minkowski => write!(f, "minkowski"),
        }
    }
}

impl std::str::FromStr for MetricSign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(MetricSign::Euclidean),
            "minkowski" => Ok(MetricSign::Minkowski),
            other => Err(format!(
                "unknown metric '{other}' (expected euclidean or minkowski)"
            )),
        }
    }
}

/// Orthonormal moving frame (tangent, normal, binormal).
///
/// In the Euclidean signature all three vectors are unit and pairwise
/// orthogonal; in the Minkowski signature the tangent is timelike
/// (`⟨T,T⟩₋ = -1`) while normal and binormal are spacelike (+1), and the
/// binormal is the twisted cross product `T ∧₋ n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame3 {
    pub t: [f64; 3],
    pub n: [f64; 3],
    pub b: [f64; 3],
}

impl Frame3 {
    /// The reference frame `T = e₃, n = e₁, b = e₂`, which is orthonormal in
    /// both signatures (e₃ is the timelike axis of the Minkowski form, and
    /// `e₃ ∧± e₁ = e₂` either way).
    pub fn standard(_metric: MetricSign) -> Self {
        Frame3 {
            t: [0.0, 0.0, 1.0],
            n: [1.0, 0.0, 0.0],
            b: [0.0, 1.0, 0.0],
        }
    }

    /// Largest deviation of the six Gram entries from their ideal values in
    /// the chosen signature.
    pub fn orthonormality_deviation(&self, metric: MetricSign) -> f64 {
        let et = metric.tangent_square();
        [
            metric.inner(self.t, self.t) - et,
            metric.inner(self.n, self.n) - 1.0,
            metric.inner(self.b, self.b) - 1.0,
            metric.inner(self.t, self.n),
            metric.inner(self.t, self.b),
            metric.inner(self.n, self.b),
        ]
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
    }
}

/// Curvature and generalized torsion sampled on an arclength grid.
#[derive(Debug, Clone)]
pub struct CurvatureTorsion {
    grid: SpatialGrid,
    c: Vec<f64>,
    tau: Vec<f64>,
}

impl CurvatureTorsion {
    /// Wrap curvature and torsion samples (one per grid node, all finite).
    /// Sign conditions on the curvature are checked where they matter — at
    /// reconstruction — so purely spectral uses can carry signed profiles.
    pub fn new(grid: SpatialGrid, c: Vec<f64>, tau: Vec<f64>) -> Result<Self, FilamentError> {
        for samples in [&c, &tau] {
            if samples.len() != grid.n() {
                return Err(FilamentError::LengthMismatch {
                    expected: grid.n(),
                    got: samples.len(),
                });
            }
            if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
                return Err(FilamentError::NonFiniteSample(j));
            }
        }
        Ok(Self { grid, c, tau })
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn curvature(&self) -> &[f64] {
        &self.c
    }

    pub fn torsion(&self) -> &[f64] {
        &self.tau
    }
}

/// A reconstructed space curve: `n + 1` points (the right endpoint `x = +L`
/// is materialized) with a moving frame at each point and a time label.
#[derive(Debug, Clone)]
pub struct Curve3 {
    grid: SpatialGrid,
    points: Vec<[f64; 3]>,
    frames: Vec<Frame3>,
    time: f64,
}

impl Curve3 {
    pub(crate) fn from_parts(grid: SpatialGrid, points: Vec<[f64; 3]>, frames: Vec<Frame3>) -> Self {
        debug_assert_eq!(points.len(), grid.n() + 1);
        debug_assert_eq!(frames.len(), grid.n() + 1);
        Curve3 {
            grid,
            points,
            frames,
            time: 0.0,
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// Curve points, one per grid node plus the right endpoint.
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn frames(&self) -> &[Frame3] {
        &self.frames
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Relabel the curve's time (reconstruction itself is time-agnostic).
    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    /// Tangent samples `γ(x_j)` — the indicatrix fed to the map invariant.
    pub fn tangents(&self) -> Vec<[f64; 3]> {
        self.frames.iter().map(|f| f.t).collect()
    }

    /// Coordinate distance between the two endpoints — zero for a closed
    /// curve whose length divides the box, so it measures closure defects.
    pub fn closure_gap(&self) -> f64 {
        v3::norm(v3::sub(
            self.points[self.points.len() - 1],
            self.points[0],
        ))
    }
}
