//! Exact substeps, their Strang composition, and the trajectory driver.
//!
//! Both substeps solve their own flow exactly:
//!
//! * [`free_flow`] applies the periodic Schrödinger propagator as the Fourier
//!   multiplier `e^{-iσ·dt·ξ²}` — exact for band-limited data.
//! * [`nonlinear_phase_step`] rotates the total field `w = β + ψ` pointwise by
//!   `exp(iσρ(|w|^α·G - B))`, where `G = ∫g ds` and `B = ∫g·|β|^α ds` are the
//!   closed-form coefficient integrals over the step. Because `|w|` is
//!   invariant under the rotation, this solves the gauge ODE exactly even for
//!   time-dependent coefficients.
//!
//! [`strang_step`] composes them symmetrically; [`integrate`] walks a
//! [`TimeMesh`], records diagnostics at a configurable cadence, and retains a
//! bounded set of full-field snapshots at geometrically spread times.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use super::{EquationSpec, FieldState, SolverError, SpatialGrid, SpectralWorkspace, TimeMesh};
use crate::closed_forms::Sign;
use crate::diagnostics::{DiagnosticsAccumulator, DiagnosticsRecord};

fn check_sigma(sigma: f64) -> Result<(), SolverError> {
    if sigma == 1.0 || sigma == -1.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidSigma(sigma))
    }
}

/// Exact free flow `ψ ↦ e^{iσ·dt·∂_xx}ψ` on the periodic grid.
///
/// `sigma` is the time-direction sign in `σi∂_tψ + ∂_xxψ = 0` (so the Fourier
/// symbol is `e^{-iσ·dt·ξ²}`), and `dt` may be negative — the flow is a group,
/// and backward propagation is how scattering profiles are pulled to a base
/// time. A zero step returns the input unchanged, bit for bit.
pub fn free_flow(
    ws: &mut SpectralWorkspace,
    state: &FieldState,
    sigma: f64,
    dt: f64,
) -> Result<FieldState, SolverError> {
    if ws.grid() != state.grid() {
        return Err(SolverError::GridMismatch);
    }
    check_sigma(sigma)?;
    if !dt.is_finite() {
        return Err(SolverError::NonFinite(format!("free-flow step dt = {dt}")));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let mut out = state.clone();
    ws.apply_symbol(out.values_mut(), |xi| {
        Complex64::from_polar(1.0, -sigma * dt * xi * xi)
    });
    out.set_time(state.time() + dt);
    Ok(out)
}

/// Exact nonlinear phase rotation over `[t, t + dt]`.
///
/// The gauge flow `σi∂_tψ = -ρg(t)(|β+ψ|^α - |β|^α)(β+ψ)` preserves `|β+ψ|`
/// pointwise, so it integrates in closed form: with `w = ψ + β(t_mid)`,
///
/// ```text
///     ψ ← w·exp(iθ) - β(t_mid),    θ = σρ·(|w|^α·G - B),
/// ```
///
/// where `G` and `B` are the exact coefficient integrals of the equation
/// family over the step and `t_mid = t + dt/2` is where the background is
/// frozen for the step. The returned state keeps the input's time stamp; the
/// enclosing splitting owns the clock.
pub fn nonlinear_phase_step(
    state: &FieldState,
    spec: &EquationSpec,
    t: f64,
    dt: f64,
) -> Result<FieldState, SolverError> {
    nonlinear_phase_step_with_rho(state, spec, t, dt, spec.rho())
}

/// Same as [`nonlinear_phase_step`] but with the focusing/defocusing sign
/// supplied explicitly, so the integrator can inject a deliberate sign fault
/// to demonstrate that the conservation-law checks catch it.
pub(crate) fn nonlinear_phase_step_with_rho(
    state: &FieldState,
    spec: &EquationSpec,
    t: f64,
    dt: f64,
    rho: f64,
) -> Result<FieldState, SolverError> {
    if !(t.is_finite() && dt.is_finite()) || dt < 0.0 {
        return Err(SolverError::InvalidTime(format!(
            "phase step over [{t}, {}] (dt must be finite and non-negative)",
            t + dt
        )));
    }
    if spec.requires_positive_time() && t <= 0.0 {
        return Err(SolverError::InvalidTime(format!(
            "family {} is defined for t > 0, got t = {t}",
            spec.family()
        )));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let sigma = spec.sigma();
    let g_int = spec.coefficient_integral(t, t + dt);
    let b_int = spec.background_phase_integral(t, t + dt);
    if !(g_int.is_finite() && b_int.is_finite()) {
        return Err(SolverError::NonFinitePhase { node: 0, t });
    }
    let t_mid = t + 0.5 * dt;
    let grid = state.grid();
    let static_bg = spec.background_is_static();
    let beta_const = spec.background(t_mid, 0.0);
    let mut out = state.clone();
    for (j, v) in out.values_mut().iter_mut().enumerate() {
        let beta = if static_bg {
            beta_const
        } else {
            spec.background(t_mid, grid.node(j))
        };
        let w = *v + beta;
        let theta = sigma * rho * (spec.modulus_power(w) * g_int - b_int);
        if !theta.is_finite() {
            return Err(SolverError::NonFinitePhase { node: j, t });
        }
        *v = w * Complex64::from_polar(1.0, theta) - beta;
    }
    Ok(out)
}

/// One Strang step over `[t, t + dt]`: a half free flow, the full nonlinear
/// rotation, and another half free flow.
///
/// This is literally the composition of the two public substeps — the result
/// is bit-for-bit identical to calling them by hand in that order.
pub fn strang_step(
    ws: &mut SpectralWorkspace,
    state: &FieldState,
    spec: &EquationSpec,
    t: f64,
    dt: f64,
) -> Result<FieldState, SolverError> {
    strang_step_with_rho(ws, state, spec, t, dt, spec.rho())
}

pub(crate) fn strang_step_with_rho(
    ws: &mut SpectralWorkspace,
    state: &FieldState,
    spec: &EquationSpec,
    t: f64,
    dt: f64,
    rho: f64,
) -> Result<FieldState, SolverError> {
    let half = free_flow(ws, state, spec.sigma(), 0.5 * dt)?;
    let kicked = nonlinear_phase_step_with_rho(&half, spec, t, dt, rho)?;
    free_flow(ws, &kicked, spec.sigma(), 0.5 * dt)
}

/// Closed-form plane-wave solution of the homogeneous cubic equation
/// `σi∂_tψ + ∂_xxψ + ρ|ψ|²ψ = 0` (the zero-background family), for use as an
/// exact reference in convergence studies.
///
/// Returns `(t, x) ↦ amp·e^{i(kx - ωt)}` with `ω = σ(k² - ρ·amp²)`. The
/// wavenumber must be a resolvable grid frequency — `k·L/π` an integer in
/// `[-n/2, n/2)` — because a plane wave off the frequency lattice is not
/// periodic on the box and cannot be represented without aliasing.
pub fn plane_wave_reference(
    grid: &SpatialGrid,
    k: f64,
    amp: f64,
    sign: Sign,
    sigma: f64,
) -> Result<impl Fn(f64, f64) -> Complex64, SolverError> {
    check_sigma(sigma)?;
    if !(k.is_finite() && amp.is_finite()) {
        return Err(SolverError::NonFinite(format!(
            "plane wave parameters k = {k}, amp = {amp}"
        )));
    }
    let m = k * grid.half_width() / std::f64::consts::PI;
    let m_round = m.round();
    let half_band = (grid.n() / 2) as f64;
    if (m - m_round).abs() > 1e-9 * m.abs().max(1.0)
        || m_round < -half_band
        || m_round >= half_band
    {
        return Err(SolverError::NonGridWavenumber { k });
    }
    let omega = sigma * (k * k - sign.rho() * amp * amp);
    Ok(move |t: f64, x: f64| amp * Complex64::from_polar(1.0, k * x - omega * t))
}

/// Knobs for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    /// Record diagnostics every this many steps (the final step is always
    /// recorded). Must be at least 1.
    pub record_every: usize,
    /// Maximum number of full-field snapshots to retain (at least the two
    /// endpoints are kept).
    pub snapshot_budget: usize,
    /// Deliberately run the nonlinear substep with the opposite
    /// focusing/defocusing sign. The scheme still conserves mass pointwise,
    /// but the energy ledger is driven off its law — a built-in demonstration
    /// that the diagnostics catch a wrong-sign nonlinearity.
    pub inject_nonlinear_sign_fault: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            record_every: 1,
            snapshot_budget: 64,
            inject_nonlinear_sign_fault: false,
        }
    }
}

/// Where a run stopped early because the field left the finite range.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowUpInfo {
    /// Index of the step at which the bad value was produced or detected.
    pub step: usize,
    /// Mesh time associated with that step.
    pub time: f64,
}

/// The output of [`integrate`]: diagnostics records at the chosen cadence,
/// a bounded set of full-field snapshots, and an optional early-stop marker.
#[derive(Debug, Clone)]
pub struct Trajectory {
    spec: EquationSpec,
    mesh: TimeMesh,
    records: Vec<DiagnosticsRecord>,
    snapshots: Vec<FieldState>,
    blow_up: Option<BlowUpInfo>,
}

impl Trajectory {
    pub fn spec(&self) -> EquationSpec {
        self.spec
    }

    pub fn mesh(&self) -> TimeMesh {
        self.mesh
    }

    pub fn grid(&self) -> SpatialGrid {
        self.snapshots[0].grid()
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn snapshots(&self) -> &[FieldState] {
        &self.snapshots
    }

    pub fn blow_up(&self) -> Option<BlowUpInfo> {
        self.blow_up
    }

    pub fn blew_up(&self) -> bool {
        self.blow_up.is_some()
    }

    pub fn first_record(&self) -> &DiagnosticsRecord {
        &self.records[0]
    }

    pub fn last_record(&self) -> &DiagnosticsRecord {
        self.records.last().expect("a trajectory always has records")
    }

    /// The retained snapshot whose time is closest to `t` (in log-time when
    /// both times are positive, so that "closest" matches the geometric
    /// spacing of the snapshot schedule).
    pub fn snapshot_nearest(&self, t: f64) -> &FieldState {
        fn dist(s: f64, t: f64) -> f64 {
            if s > 0.0 && t > 0.0 {
                (s / t).ln().abs()
            } else {
                (s - t).abs()
            }
        }
        self.snapshots
            .iter()
            .min_by(|a, b| dist(a.time(), t).total_cmp(&dist(b.time(), t)))
            .expect("a trajectory always has snapshots")
    }
}

/// Choose which step indices get a full-field snapshot.
///
/// Priority order: the two endpoints; then, when the mesh starts at a
/// positive time, the nodes nearest each doubling `t₀·2^k` and each decade
/// `t₀·10^m` of the start time (the tail-estimate machinery needs the
/// doublings); then an even fill in step index — which is geometric in time
/// on logarithmic meshes. The list is truncated to the budget from the back,
/// so endpoints and doublings survive a tight budget.
fn snapshot_schedule(mesh: &TimeMesh, budget: usize) -> BTreeSet<usize> {
    let steps = mesh.steps();
    let budget = budget.max(2);
    let mut ordered: Vec<usize> = vec![0, steps];
    if mesh.t_start() > 0.0 && steps > 0 {
        for base in [2.0f64, 10.0] {
            let mut target = mesh.t_start() * base;
            while target <= mesh.t_end() * (1.0 + 1e-9) {
                ordered.push(nearest_node(mesh, target));
                target *= base;
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut chosen: Vec<usize> = Vec::new();
    for j in ordered {
        if seen.insert(j) {
            chosen.push(j);
        }
    }
    let remaining = budget.saturating_sub(chosen.len());
    if remaining > 0 && steps > 1 {
        for i in 1..=remaining {
            let j = (i * steps) / (remaining + 1);
            if seen.insert(j) {
                chosen.push(j);
            }
        }
    }
    chosen.truncate(budget);
    chosen.into_iter().collect()
}

/// Index of the mesh node closest to `target` (nodes are strictly
/// increasing, so a binary search brackets it).
fn nearest_node(mesh: &TimeMesh, target: f64) -> usize {
    let mut lo = 0usize;
    let mut hi = mesh.steps();
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mesh.node(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (target - mesh.node(lo)).abs() <= (mesh.node(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Advance `initial` across `mesh` with Strang splitting, collecting
/// diagnostics and snapshots.
///
/// The initial state's time stamp must equal the mesh start exactly — a
/// mismatch is a hard error rather than a silent relabeling. Families whose
/// background or coefficients live on `t > 0` reject meshes that start at or
/// below zero. After each step the state's clock is set to the exact mesh
/// node, so record times never accumulate rounding drift.
///
/// A non-finite value (detected in the nonlinear phase or in a freshly
/// computed record) stops the run gracefully: the trajectory keeps everything
/// recorded so far and carries a [`BlowUpInfo`] marker instead of an error.
pub fn integrate(
    spec: &EquationSpec,
    mesh: &TimeMesh,
    initial: &FieldState,
    opts: &IntegrateOptions,
) -> Result<Trajectory, SolverError> {
    if opts.record_every == 0 {
        return Err(SolverError::InvalidCadence);
    }
    if initial.time() != mesh.t_start() {
        return Err(SolverError::InitialTimeMismatch {
            expected: mesh.t_start(),
            got: initial.time(),
        });
    }
    if spec.requires_positive_time() && mesh.t_start() <= 0.0 {
        return Err(SolverError::InvalidTime(format!(
            "family {} is defined for t > 0 but the mesh starts at {}",
            spec.family(),
            mesh.t_start()
        )));
    }
    let grid = initial.grid();
    let mut ws = SpectralWorkspace::new(grid);
    let mut acc = DiagnosticsAccumulator::new(*spec, grid);
    let snap_at = snapshot_schedule(mesh, opts.snapshot_budget);
    let rho = if opts.inject_nonlinear_sign_fault {
        -spec.rho()
    } else {
        spec.rho()
    };

    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut blow_up = None;

    let mut state = initial.clone();
    if snap_at.contains(&0) {
        snapshots.push(state.clone());
    }
    let first = acc.observe(&state, 0)?;
    let first_finite = first.is_finite();
    records.push(first);
    if !first_finite {
        blow_up = Some(BlowUpInfo {
            step: 0,
            time: mesh.t_start(),
        });
    } else {
        for j in 0..mesh.steps() {
            let t = mesh.node(j);
            let dt = mesh.dt(j);
            match strang_step_with_rho(&mut ws, &state, spec, t, dt, rho) {
                Ok(mut next) => {
                    next.set_time(mesh.node(j + 1));
                    state = next;
                }
                Err(SolverError::NonFinitePhase { .. }) => {
                    blow_up = Some(BlowUpInfo { step: j, time: t });
                    break;
                }
                Err(e) => return Err(e),
            }
            let step = j + 1;
            let is_snapshot = snap_at.contains(&step);
            if is_snapshot {
                snapshots.push(state.clone());
            }
            // Snapshot steps are always recorded too, so every retained field
            // has a matching ledger row.
            if step % opts.record_every == 0 || step == mesh.steps() || is_snapshot {
                let rec = acc.observe(&state, step)?;
                let finite = rec.is_finite();
                records.push(rec);
                if !finite {
                    blow_up = Some(BlowUpInfo {
                        step,
                        time: mesh.node(step),
                    });
                    break;
                }
            }
        }
    }

    Ok(Trajectory {
        spec: *spec,
        mesh: *mesh,
        records,
        snapshots,
        blow_up,
    })
}
