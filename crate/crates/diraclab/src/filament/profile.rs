//! Self-similar curvature/torsion profiles, the Hasimoto map to complex
//! wavefunctions, and corner-tangent estimation by extrapolating endpoint
//! tangents to `t → 0`.

use num_complex::Complex64;
use serde::Serialize;

use super::frenet::reconstruct_curve;
use super::v3;
use super::{CurvatureTorsion, FilamentError, Frame3, MetricSign};
use crate::solver::SpatialGrid;

/// Leave-one-out spread below which a corner extrapolation is considered
/// converged.
pub const CORNER_SPREAD_TOL: f64 = 1e-3;

/// Curvature `c0/√t` (constant in x) and torsion `x/(2t)` — the profile whose
/// binormal flow rescales self-similarly and sharpens into a corner as
/// `t → 0`.
pub fn self_similar_profile(
    c0: f64,
    t: f64,
    grid: SpatialGrid,
) -> Result<CurvatureTorsion, FilamentError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(FilamentError::NonPositiveTime(t));
    }
    if !(c0 >= 0.0 && c0.is_finite()) {
        return Err(FilamentError::InvalidParameter(format!(
            "curvature amplitude must be finite and non-negative, got {c0}"
        )));
    }
    let c = c0 / t.sqrt();
    let curv = vec![c; grid.n()];
    let tau = grid.nodes().into_iter().map(|x| x / (2.0 * t)).collect();
    CurvatureTorsion::new(grid, curv, tau)
}

/// The Hasimoto map: complex samples `Ψ_j = c_j · e^{iφ_j}` with the phase
/// `φ` the cumulative trapezoid integral of the torsion from the center node
/// `x = 0`. Exact (to roundoff) whenever the torsion is linear in x.
pub fn hasimoto(ct: &CurvatureTorsion) -> Vec<Complex64> {
    let n = ct.grid().n();
    let dx = ct.grid().dx();
    let tau = ct.torsion();
    let jc = n / 2;
    let mut phase = vec![0.0; n];
    for j in jc..n - 1 {
        phase[j + 1] = phase[j] + 0.5 * dx * (tau[j] + tau[j + 1]);
    }
    for j in (0..jc).rev() {
        phase[j] = phase[j + 1] - 0.5 * dx * (tau[j] + tau[j + 1]);
    }
    ct.curvature()
        .iter()
        .zip(&phase)
        .map(|(&c, &p)| Complex64::from_polar(c, p))
        .collect()
}

/// Times at which the endpoint oscillation of the frame system locks to the
/// same value on every level.
///
/// The frame of the self-similar profile rotates at the local rate
/// `√(τ² ± c²)` (`+` in the Euclidean signature, `−` in the Minkowski one),
/// so the phase accumulated from the center to the endpoint `x = L` is
/// `L²/(4t) ± c0²·ln(L/√t) + O(t)`. Freezing only the leading `L²/4t` term
/// leaves the logarithm drifting by `±c0²·ln√2` per halving, which slowly
/// rotates the `O(√t)` correction to the endpoint tangent and stalls the
/// corner extrapolation near that rotation scale. The returned times
/// therefore solve the full lock
///
/// `L²/(4t_k) − ε·(c0²/2)·ln t_k = 2π·m₀·2^k`,  `ε = ⟨T,T⟩ = ±1`,
///
/// by a guarded Newton iteration from the `c0 = 0` closed form
/// `t_k = L²/(8π m₀ 2^k)`, which the solution reduces to exactly when the
/// curvature vanishes. Halving the winding count per level keeps the lock at
/// every level and places the `√t` extrapolation nodes on a geometric
/// ladder, which is what keeps polynomial extrapolation to `t = 0`
/// well-conditioned.
pub fn phase_locked_times(
    half_width: f64,
    c0: f64,
    metric: MetricSign,
    m0: u32,
    count: usize,
) -> Result<Vec<f64>, FilamentError> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(FilamentError::InvalidParameter(format!(
            "half-width must be positive and finite, got {half_width}"
        )));
    }
    if !(c0 >= 0.0 && c0.is_finite()) {
        return Err(FilamentError::InvalidParameter(format!(
            "curvature amplitude must be finite and non-negative, got {c0}"
        )));
    }
    if m0 == 0 || count == 0 {
        return Err(FilamentError::InvalidParameter(
            "phase lock needs m0 >= 1 and count >= 1".into(),
        ));
    }
    let theta0 = 2.0 * std::f64::consts::PI * m0 as f64;
    if c0 * c0 >= theta0 {
        return Err(FilamentError::InvalidParameter(format!(
            "winding count m0 = {m0} is too small to lock curvature amplitude {c0}"
        )));
    }
    let eps = metric.tangent_square();
    let l2 = half_width * half_width;
    Ok((0..count)
        .map(|k| {
            let theta = theta0 * (1u64 << k) as f64;
            let mut t = l2 / (4.0 * theta);
            for _ in 0..64 {
                let f = l2 / (4.0 * t) - eps * 0.5 * c0 * c0 * t.ln() - theta;
                let fp = -l2 / (4.0 * t * t) - eps * 0.5 * c0 * c0 / t;
                let mut step = f / fp;
                // Keep the iterate positive; the root is within a factor of
                // a few of the initial guess.
                while t - step <= 0.0 {
                    step *= 0.5;
                }
                t -= step;
                if step.abs() <= 1e-15 * t {
                    break;
                }
            }
            t
        })
        .collect())
}

/// Endpoint tangents measured at one reconstruction time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CornerSample {
    pub t: f64,
    /// Tangent at the right endpoint `x = +L`.
    pub a1: [f64; 3],
    /// Tangent at the left endpoint `x = -L`.
    pub a2: [f64; 3],
}

/// Extrapolated corner data: the two limit tangents, the angle between them,
/// and the leave-one-out spread of the extrapolation.
#[derive(Debug, Clone, Serialize)]
pub struct CornerEstimate {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    /// Angle between the limit tangents: circular in the Euclidean
    /// signature, hyperbolic in the Minkowski one.
    pub angle: f64,
    /// Largest displacement of the estimate when any single time is dropped
    /// from the extrapolation.
    pub spread: f64,
    /// Whether `spread <= CORNER_SPREAD_TOL`.
    pub converged: bool,
    pub per_time: Vec<CornerSample>,
}

/// Polynomial extrapolation to zero through `(u_k, f_k)` (Neville's scheme).
fn neville_at_zero(us: &[f64], fs: &[f64]) -> f64 {
    debug_assert_eq!(us.len(), fs.len());
    let m = us.len();
    let mut p = fs.to_vec();
    for level in 1..m {
        for i in 0..m - level {
            p[i] = (us[i + level] * p[i] - us[i] * p[i + 1]) / (us[i + level] - us[i]);
        }
    }
    p[0]
}

/// Extrapolate a tangent component-wise to `u = √t = 0` over a subset of
/// samples, then normalize against the metric. `None` if the extrapolated
/// vector is degenerate or has the wrong causal type for a tangent.
fn extrapolate_tangent(
    us: &[f64],
    samples: &[[f64; 3]],
    skip: Option<usize>,
    metric: MetricSign,
) -> Option<[f64; 3]> {
    let mut u_sub = Vec::with_capacity(us.len());
    let mut f_sub = [Vec::new(), Vec::new(), Vec::new()];
    for (k, (&u, s)) in us.iter().zip(samples).enumerate() {
        if skip == Some(k) {
            continue;
        }
        u_sub.push(u);
        for (c, f) in f_sub.iter_mut().enumerate() {
            f.push(s[c]);
        }
    }
    let raw = [
        neville_at_zero(&u_sub, &f_sub[0]),
        neville_at_zero(&u_sub, &f_sub[1]),
        neville_at_zero(&u_sub, &f_sub[2]),
    ];
    let q = metric.inner(raw, raw);
    if !q.is_finite() || q * metric.tangent_square() <= 0.0 {
        return None;
    }
    Some(v3::scale(raw, 1.0 / q.abs().sqrt()))
}

/// Estimate the corner tangents of the self-similar flow with amplitude
/// `c0`: reconstruct the curve at each time in `t_sequence` (strictly
/// decreasing, at least three entries — use [`phase_locked_times`] so the
/// endpoint oscillation is frozen), read the endpoint tangents, and
/// extrapolate them to `t = 0` in powers of `√t`.
///
/// Convergence is *flagged*, not asserted: the leave-one-out `spread` and
/// the `converged` flag land in the result so callers can decide. The only
/// hard failure after validation is an extrapolation so degenerate that the
/// limit vectors cannot be normalized.
pub fn corner_tangents(
    c0: f64,
    metric: MetricSign,
    t_sequence: &[f64],
    grid: SpatialGrid,
) -> Result<CornerEstimate, FilamentError> {
    let usable = t_sequence
        .windows(2)
        .take_while(|w| w[1] < w[0])
        .count()
        .saturating_add(1)
        .min(t_sequence.len());
    if t_sequence.len() < 3 || usable < t_sequence.len() {
        return Err(FilamentError::BadTimeSequence {
            need: 3,
            got: usable.min(t_sequence.len()),
        });
    }
    if let Some(&bad) = t_sequence.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(FilamentError::NonPositiveTime(bad));
    }

    let n = grid.n();
    let seed = Frame3::standard(metric);
    let mut us = Vec::with_capacity(t_sequence.len());
    let mut a1s = Vec::with_capacity(t_sequence.len());
    let mut a2s = Vec::with_capacity(t_sequence.len());
    let mut per_time = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        let ct = self_similar_profile(c0, t, grid)?;
        let curve = reconstruct_curve(&ct, metric, &seed, [0.0; 3])?.with_time(t);
        let a1 = curve.frames()[n].t;
        let a2 = curve.frames()[0].t;
        us.push(t.sqrt());
        a1s.push(a1);
        a2s.push(a2);
        per_time.push(CornerSample { t, a1, a2 });
    }

    let a1 = extrapolate_tangent(&us, &a1s, None, metric);
    let a2 = extrapolate_tangent(&us, &a2s, None, metric);
    let (a1, a2) = match (a1, a2) {
        (Some(a1), Some(a2)) => (a1, a2),
        _ => {
            return Err(FilamentError::NonConvergent {
                spread: f64::INFINITY,
            })
        }
    };

    let mut spread: f64 = 0.0;
    for skip in 0..us.len() {
        for (full, samples) in [(a1, &a1s), (a2, &a2s)] {
            match extrapolate_tangent(&us, samples, Some(skip), metric) {
                Some(est) => spread = spread.max(v3::norm(v3::sub(est, full))),
                None => {
                    return Err(FilamentError::NonConvergent {
                        spread: f64::INFINITY,
                    })
                }
            }
        }
    }

    let angle = match metric {
        MetricSign::Euclidean => metric.inner(a1, a2).clamp(-1.0, 1.0).acos(),
        MetricSign::Minkowski => (-metric.inner(a1, a2)).max(1.0).acosh(),
    };

    Ok(CornerEstimate {
        a1,
        a2,
        angle,
        spread,
        converged: spread <= CORNER_SPREAD_TOL,
        per_time,
    })
}
