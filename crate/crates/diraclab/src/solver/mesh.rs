//! Time meshes: uniform or logarithmic node placement.

use super::SolverError;

/// Node-placement rule for a [`TimeMesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MeshRule {
    /// Equal steps `t_j = t_start + j·Δt`.
    Uniform,
    /// Equal ratios `t_j = t_start·(t_end/t_start)^{j/steps}`; requires
    /// `t_start > 0`. Nodes are computed as `t_start·2^{j·log₂(t_end/t_start)/steps}`,
    /// so meshes whose endpoints span an exact power of two hit the dyadic
    /// times `2^k·t_start` exactly — the scattering diagnostics rely on this.
    Logarithmic,
}

impl std::str::FromStr for MeshRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(MeshRule::Uniform),
            "log" | "logarithmic" => Ok(MeshRule::Logarithmic),
            other => Err(format!("unknown mesh rule '{other}' (use uniform|log)")),
        }
    }
}

impl std::fmt::Display for MeshRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshRule::Uniform => write!(f, "uniform"),
            MeshRule::Logarithmic => write!(f, "log"),
        }
    }
}

/// A strictly increasing sequence of `steps + 1` time nodes from `t_start`
/// to `t_end`.
///
/// The degenerate zero-step mesh (for a single-record "integration" that only
/// evaluates diagnostics at one instant) is available through
/// [`TimeMesh::stationary`]; the normal constructor requires at least one
/// step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TimeMesh {
    t_start: f64,
    t_end: f64,
    steps: usize,
    rule: MeshRule,
}

impl TimeMesh {
    /// `t_end > t_start ≥ 0`, `steps ≥ 1`; the logarithmic rule additionally
    /// requires `t_start > 0`.
    pub fn new(t_start: f64, t_end: f64, steps: usize, rule: MeshRule) -> Result<Self, SolverError> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(SolverError::InvalidMesh(format!(
                "mesh endpoints must be finite, got [{t_start}, {t_end}]"
            )));
        }
        if steps == 0 {
            return Err(SolverError::InvalidMesh(
                "steps must be >= 1 (use TimeMesh::stationary for a single-instant mesh)".into(),
            ));
        }
        if !(t_end > t_start) {
            return Err(SolverError::InvalidMesh(format!(
                "t_end must exceed t_start, got [{t_start}, {t_end}]"
            )));
        }
        match rule {
            MeshRule::Uniform => {
                if t_start < 0.0 {
                    return Err(SolverError::InvalidMesh(format!(
                        "uniform meshes start at t >= 0, got {t_start}"
                    )));
                }
            }
            MeshRule::Logarithmic => {
                if !(t_start > 0.0) {
                    return Err(SolverError::InvalidMesh(format!(
                        "logarithmic meshes need t_start > 0, got {t_start}"
                    )));
                }
            }
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
            rule,
        })
    }

    /// The zero-step mesh pinned at one instant.
    pub fn stationary(t: f64) -> Result<Self, SolverError> {
        if !t.is_finite() {
            return Err(SolverError::InvalidMesh(format!(
                "stationary time must be finite, got {t}"
            )));
        }
        Ok(Self {
            t_start: t,
            t_end: t,
            steps: 0,
            rule: MeshRule::Uniform,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rule(&self) -> MeshRule {
        self.rule
    }

    pub fn is_stationary(&self) -> bool {
        self.steps == 0
    }

    /// The `j`-th node, `0 ≤ j ≤ steps`. Endpoints are reproduced exactly.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.steps);
        if j == 0 {
            return self.t_start;
        }
        if j == self.steps {
            return self.t_end;
        }
        match self.rule {
            MeshRule::Uniform => {
                let frac = j as f64 / self.steps as f64;
                self.t_start + (self.t_end - self.t_start) * frac
            }
            MeshRule::Logarithmic => {
                let span = (self.t_end / self.t_start).log2();
                self.t_start * (span * j as f64 / self.steps as f64).exp2()
            }
        }
    }

    /// All `steps + 1` nodes.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.node(j)).collect()
    }

    /// Step length `t_{j+1} - t_j`.
    pub fn dt(&self, j: usize) -> f64 {
        self.node(j + 1) - self.node(j)
    }
}
