//! Frenet reconstruction of a space curve from curvature/torsion data and
//! the binormal-flow velocity of a reconstructed curve.
//!
//! The frame system integrated here is
//!
//! ```text
//! χ' = T,   T' = c n,   n' = -ε_T c T + τ b,   b' = -τ n,
//! ```
//!
//! where `ε_T = ⟨T,T⟩` is +1 in the Euclidean signature and -1 in the
//! Minkowski one (timelike tangents). Both cases keep the frame orthonormal
//! with respect to the chosen form, and the binormal stays the twisted cross
//! product `T ∧± n` along the flow.

use super::v3;
use super::{Curve3, CurvatureTorsion, FilamentError, Frame3, MetricSign};

/// Largest orthonormality deviation accepted in a seed frame.
const SEED_TOL: f64 = 1e-8;

#[derive(Clone, Copy)]
struct CurveState {
    chi: [f64; 3],
    t: [f64; 3],
    n: [f64; 3],
    b: [f64; 3],
}

impl CurveState {
    fn axpy(self, h: f64, d: CurveState) -> CurveState {
        CurveState {
            chi: v3::add(self.chi, v3::scale(d.chi, h)),
            t: v3::add(self.t, v3::scale(d.t, h)),
            n: v3::add(self.n, v3::scale(d.n, h)),
            b: v3::add(self.b, v3::scale(d.b, h)),
        }
    }
}

/// Right-hand side of the frame system at local curvature `c`, torsion `tau`.
fn derivative(y: &CurveState, c: f64, tau: f64, metric: MetricSign) -> CurveState {
    let et = metric.tangent_square();
    CurveState {
        chi: y.t,
        t: v3::scale(y.n, c),
        n: v3::add(v3::scale(y.t, -et * c), v3::scale(y.b, tau)),
        b: v3::scale(y.n, -tau),
    }
}

/// One classical RK4 step of size `h` with coefficient values at the start,
/// midpoint, and end of the step.
fn rk4_step(
    y: CurveState,
    h: f64,
    c: (f64, f64, f64),
    tau: (f64, f64, f64),
    metric: MetricSign,
) -> CurveState {
    let k1 = derivative(&y, c.0, tau.0, metric);
    let k2 = derivative(&y.axpy(0.5 * h, k1), c.1, tau.1, metric);
    let k3 = derivative(&y.axpy(0.5 * h, k2), c.1, tau.1, metric);
    let k4 = derivative(&y.axpy(h, k3), c.2, tau.2, metric);
    let mut out = y;
    for (dst, parts) in [
        (&mut out.chi, [k1.chi, k2.chi, k3.chi, k4.chi]),
        (&mut out.t, [k1.t, k2.t, k3.t, k4.t]),
        (&mut out.n, [k1.n, k2.n, k3.n, k4.n]),
        (&mut out.b, [k1.b, k2.b, k3.b, k4.b]),
    ] {
        let sum = v3::add(
            v3::add(parts[0], v3::scale(parts[1], 2.0)),
            v3::add(v3::scale(parts[2], 2.0), parts[3]),
        );
        *dst = v3::add(*dst, v3::scale(sum, h / 6.0));
    }
    out
}

/// Lagrange cubic through four consecutive samples placed at local
/// coordinates `u = 0, 1, 2, 3`, evaluated at `u`.
fn cubic4(f: [f64; 4], u: f64) -> f64 {
    let l0 = (u - 1.0) * (u - 2.0) * (u - 3.0) / -6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = u * (u - 1.0) * (u - 3.0) / -2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    f[0] * l0 + f[1] * l1 + f[2] * l2 + f[3] * l3
}

/// Sample values at the start, midpoint, and end of the interval
/// `[x_j, x_{j+1}]` by cubic interpolation on the nearest four nodes. The
/// final interval (ending at the materialized right endpoint) extrapolates
/// the last cubic; torsion profiles are linear-in-x rather than periodic, so
/// wrapping around the box would kink the data at the seam.
fn interval_values(vals: &[f64], j: usize) -> (f64, f64, f64) {
    let n = vals.len();
    debug_assert!(n >= 4 && j < n);
    let base = j.saturating_sub(1).min(n - 4);
    let f = [vals[base], vals[base + 1], vals[base + 2], vals[base + 3]];
    let u0 = (j - base) as f64;
    let start = vals[j];
    let mid = cubic4(f, u0 + 0.5);
    let end = if j + 1 < n {
        vals[j + 1]
    } else {
        cubic4(f, u0 + 1.0)
    };
    (start, mid, end)
}

/// Re-orthonormalize a frame against the chosen bilinear form: normalize the
/// tangent, project it out of the normal, and rebuild the binormal as the
/// twisted cross product. Keeps drift of the Gram matrix at roundoff level
/// over long sweeps.
fn renormalize(frame: Frame3, metric: MetricSign, x: f64) -> Result<Frame3, FilamentError> {
    let et = metric.tangent_square();
    let tt = metric.inner(frame.t, frame.t);
    if !tt.is_finite() || tt * et <= 0.0 {
        return Err(FilamentError::FrameDegeneracy {
            x,
            what: format!("tangent pseudo-norm² = {tt:.3e} has the wrong causal type"),
        });
    }
    let t = v3::scale(frame.t, 1.0 / tt.abs().sqrt());
    // Subtract the tangential component: proj_T(n) = ε_T ⟨n,T⟩ T.
    let n_raw = v3::sub(frame.n, v3::scale(t, et * metric.inner(frame.n, t)));
    let nn = metric.inner(n_raw, n_raw);
    if !nn.is_finite() || nn <= 0.0 {
        return Err(FilamentError::FrameDegeneracy {
            x,
            what: format!("normal pseudo-norm² = {nn:.3e} after projection"),
        });
    }
    let n = v3::scale(n_raw, 1.0 / nn.sqrt());
    let b = metric.cross_twisted(t, n);
    Ok(Frame3 { t, n, b })
}

/// Integrate the Frenet system from curvature/torsion samples, starting at
/// the center node `x = 0` with the given seed frame and origin and sweeping
/// outward in both directions.
///
/// The curvature must be non-negative and the seed frame orthonormal in the
/// chosen signature. Coefficients between nodes come from cubic
/// interpolation, so smooth profiles reconstruct at fourth order in the grid
/// spacing. Each step is followed by a metric Gram–Schmidt pass, which keeps
/// indicatrix invariants pinned to ±1 over arbitrarily long sweeps.
pub fn reconstruct_curve(
    ct: &CurvatureTorsion,
    metric: MetricSign,
    seed: &Frame3,
    origin: [f64; 3],
) -> Result<Curve3, FilamentError> {
    let grid = ct.grid();
    let n = grid.n();
    if n < 4 {
        return Err(FilamentError::InvalidParameter(format!(
            "reconstruction needs at least 4 nodes, got {n}"
        )));
    }
    if let Some((j, &value)) = ct.curvature().iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(FilamentError::NegativeCurvature { index: j, value });
    }
    let dev = seed.orthonormality_deviation(metric);
    if !(dev <= SEED_TOL) {
        return Err(FilamentError::SeedNotOrthonormal(dev));
    }
    if !v3::is_finite(origin) {
        return Err(FilamentError::InvalidParameter(
            "origin must be finite".into(),
        ));
    }

    let dx = grid.dx();
    let jc = n / 2; // grid node at x = 0 exactly
    let mut points = vec![[0.0; 3]; n + 1];
    let mut frames = vec![Frame3::standard(metric); n + 1];
    points[jc] = origin;
    frames[jc] = *seed;

    let start = CurveState {
        chi: origin,
        t: seed.t,
        n: seed.n,
        b: seed.b,
    };

    // Forward sweep: intervals [x_j, x_{j+1}] for j = jc .. n-1.
    let mut y = start;
    for j in jc..n {
        let c = interval_values(ct.curvature(), j);
        let tau = interval_values(ct.torsion(), j);
        y = rk4_step(y, dx, c, tau, metric);
        let frame = renormalize(
            Frame3 {
                t: y.t,
                n: y.n,
                b: y.b,
            },
            metric,
            grid.node(j) + dx,
        )?;
        y.t = frame.t;
        y.n = frame.n;
        y.b = frame.b;
        points[j + 1] = y.chi;
        frames[j + 1] = frame;
    }

    // Backward sweep: the same intervals traversed right to left for
    // j = jc-1 down to 0.
    let mut y = start;
    for j in (0..jc).rev() {
        let (c0, cm, c1) = interval_values(ct.curvature(), j);
        let (tau0, taum, tau1) = interval_values(ct.torsion(), j);
        y = rk4_step(y, -dx, (c1, cm, c0), (tau1, taum, tau0), metric);
        let frame = renormalize(
            Frame3 {
                t: y.t,
                n: y.n,
                b: y.b,
            },
            metric,
            grid.node(j),
        )?;
        y.t = frame.t;
        y.n = frame.n;
        y.b = frame.b;
        points[j] = y.chi;
        frames[j] = frame;
    }

    Ok(Curve3::from_parts(grid, points, frames))
}

/// First-derivative five-point stencil weights (denominator `12h`) for a
/// node at offset `p` within the window.
const D1_WEIGHTS: [[f64; 5]; 5] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
    [1.0, -8.0, 0.0, 8.0, -1.0],
    [-1.0, 6.0, -18.0, 10.0, 3.0],
    [3.0, -16.0, 36.0, -48.0, 25.0],
];

/// Second-derivative six-point one-sided stencils (denominator `12h²`) for
/// the two left-edge nodes; the right edge uses the same weights reversed.
const D2_EDGE: [[f64; 6]; 2] = [
    [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
    [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
];

/// Centered five-point second-derivative stencil (denominator `12h²`).
const D2_CENTER: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

fn stencil_dot<const W: usize>(pts: &[[f64; 3]], start: usize, w: &[f64; W]) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for (k, &wk) in w.iter().enumerate() {
        acc = v3::add(acc, v3::scale(pts[start + k], wk));
    }
    acc
}

/// Velocity field of the binormal flow, `v_j = χ_x ∧± χ_xx`, from
/// fourth-order finite differences on the reconstructed points.
///
/// Fails with [`FilamentError::UnderResolved`] if consecutive numerical
/// tangents turn by more than a right angle in a single grid step — finite
/// differences carry no information at that point and the velocity would be
/// garbage rather than merely inaccurate.
pub fn binormal_velocity(
    curve: &Curve3,
    metric: MetricSign,
) -> Result<Vec<[f64; 3]>, FilamentError> {
    let pts = curve.points();
    let m = pts.len();
    if m < 6 {
        return Err(FilamentError::InvalidParameter(format!(
            "velocity extraction needs at least 6 points, got {m}"
        )));
    }
    let h = curve.grid().dx();

    let mut d1 = vec![[0.0; 3]; m];
    let mut d2 = vec![[0.0; 3]; m];
    for j in 0..m {
        // Window start and the node's offset within it, clamped at the ends.
        let start = j.saturating_sub(2).min(m - 5);
        let p = j - start;
        d1[j] = v3::scale(stencil_dot(pts, start, &D1_WEIGHTS[p]), 1.0 / (12.0 * h));
        d2[j] = if (2..m - 2).contains(&j) {
            v3::scale(stencil_dot(pts, j - 2, &D2_CENTER), 1.0 / (12.0 * h * h))
        } else if j < 2 {
            v3::scale(stencil_dot(pts, 0, &D2_EDGE[j]), 1.0 / (12.0 * h * h))
        } else {
            let mut w = D2_EDGE[m - 1 - j];
            w.reverse();
            v3::scale(stencil_dot(pts, m - 6, &w), 1.0 / (12.0 * h * h))
        };
    }

    // Resolution guard: successive unit tangents must not turn past π/2.
    for j in 0..m - 1 {
        let step = v3::sub(pts[j + 1], pts[j]);
        let prev = if j == 0 {
            step
        } else {
            v3::sub(pts[j], pts[j - 1])
        };
        let na = v3::norm(prev);
        let nb = v3::norm(step);
        if na == 0.0 || nb == 0.0 {
            return Err(FilamentError::UnderResolved {
                index: j,
                angle: f64::NAN,
            });
        }
        let cosang = (prev[0] * step[0] + prev[1] * step[1] + prev[2] * step[2]) / (na * nb);
        if cosang < 0.0 {
            return Err(FilamentError::UnderResolved {
                index: j,
                angle: cosang.clamp(-1.0, 1.0).acos(),
            });
        }
    }

    Ok((0..m)
        .map(|j| metric.cross_twisted(d1[j], d2[j]))
        .collect())
}

/// Pointwise value of the quadratic form on tangent samples,
/// `⟨𝔄± γ_j, γ_j⟩` — identically +1 on a spherical indicatrix and -1 on a
/// hyperbolic one.
pub fn sm_invariant(gamma: &[[f64; 3]], metric: MetricSign) -> Vec<f64> {
    gamma.iter().map(|&g| metric.inner(g, g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SpatialGrid;

    fn profile(
        grid: SpatialGrid,
        c: impl Fn(f64) -> f64,
        tau: impl Fn(f64) -> f64,
    ) -> CurvatureTorsion {
        let cs = grid.nodes().into_iter().map(&c).collect();
        let ts = grid.nodes().into_iter().map(&tau).collect();
        CurvatureTorsion::new(grid, cs, ts).unwrap()
    }

    #[test]
    fn zero_curvature_reconstructs_a_straight_line() {
        let grid = SpatialGrid::new(64, 2.0).unwrap();
        let ct = profile(grid, |_| 0.0, |_| 0.0);
        let curve = reconstruct_curve(
            &ct,
            MetricSign::Euclidean,
            &Frame3::standard(MetricSign::Euclidean),
            [0.0, 0.0, 0.0],
        )
        .unwrap();
        for (j, p) in curve.points().iter().enumerate() {
            let x = if j == grid.n() {
                grid.half_width()
            } else {
                grid.node(j)
            };
            let gap = v3::norm(v3::sub(*p, [0.0, 0.0, x]));
            assert!(gap <= 1e-12, "node {j}: gap {gap:.3e}");
        }
    }

    #[test]
    fn unit_circle_closes_and_sharpens_at_fourth_order() {
        // c ≡ 1, τ ≡ 0 over arclength 2π: the curve is a unit circle and the
        // endpoint gap measures global integration error.
        let gap_for = |n: usize| {
            let grid = SpatialGrid::new(n, std::f64::consts::PI).unwrap();
            let ct = profile(grid, |_| 1.0, |_| 0.0);
            reconstruct_curve(
                &ct,
                MetricSign::Euclidean,
                &Frame3::standard(MetricSign::Euclidean),
                [0.0; 3],
            )
            .unwrap()
            .closure_gap()
        };
        let coarse = gap_for(512);
        let fine = gap_for(1024);
        assert!(coarse < 1e-8, "coarse gap {coarse:.3e}");
        let ratio = coarse / fine;
        assert!(
            (ratio - 16.0).abs() <= 0.3 * 16.0,
            "refinement ratio {ratio:.2} (coarse {coarse:.3e}, fine {fine:.3e})"
        );
        // And at h ≤ 1e-3 the gap is far below the advertised bound.
        assert!(gap_for(8192) <= 1e-6);
    }

    #[test]
    fn helix_matches_the_closed_form() {
        // Constant c, τ: a circular helix with radius c/(c²+τ²) and pitch
        // rate τ/(c²+τ²).
        let (c, tau) = (1.0_f64, 0.5_f64);
        let w2 = c * c + tau * tau;
        let w = w2.sqrt();
        let grid = SpatialGrid::new(512, 2.0).unwrap();
        let ct = profile(grid, |_| c, |_| tau);
        // Seed chosen so the helix axis is e₃ with standard phase at x = 0:
        // T(0) = (0, c/w ... ) — simpler: verify against the generic formula
        // built from the same seed by an independent closed form.
        let seed = Frame3::standard(MetricSign::Euclidean);
        let curve =
            reconstruct_curve(&ct, MetricSign::Euclidean, &seed, [0.0; 3]).unwrap();
        // Closed form with T(0)=e₃, n(0)=e₁, b(0)=e₂:
        //   T(s) = (c/w) sin(ws) e₁ + (cτ/w²)(1-cos(ws)) e₂ + ((c²cos(ws)+τ²)/w²) e₃
        // integrated to χ(s); checked at the endpoint only.
        let s = grid.half_width();
        let chi_exact = [
            (c / w2) * (1.0 - (w * s).cos()),
            (c * tau / w2) * (s - (w * s).sin() / w),
            (c * c * (w * s).sin() / w + tau * tau * s) / w2,
        ];
        let got = curve.points()[grid.n()];
        let gap = v3::norm(v3::sub(got, chi_exact));
        assert!(gap <= 1e-9, "helix endpoint gap {gap:.3e}");
    }

    #[test]
    fn frames_stay_orthonormal_in_both_signatures() {
        for metric in [MetricSign::Euclidean, MetricSign::Minkowski] {
            let grid = SpatialGrid::new(256, 3.0).unwrap();
            let ct = profile(grid, |x| 0.8 + 0.3 * (x * 1.3).sin().powi(2), |x| 0.5 * x);
            let curve =
                reconstruct_curve(&ct, metric, &Frame3::standard(metric), [0.0; 3]).unwrap();
            let worst = curve
                .frames()
                .iter()
                .map(|f| f.orthonormality_deviation(metric))
                .fold(0.0, f64::max);
            assert!(worst <= 1e-12, "{metric}: frame drift {worst:.3e}");
            let sm = sm_invariant(&curve.tangents(), metric);
            let target = metric.tangent_square();
            let drift = sm
                .iter()
                .map(|v| (v - target).abs())
                .fold(0.0, f64::max);
            assert!(drift <= 1e-12, "{metric}: indicatrix drift {drift:.3e}");
        }
    }

    #[test]
    fn circle_velocity_matches_the_binormal_flow() {
        // Unit circle: χ_x ∧ χ_xx has |v| = c = 1 and points along the axis.
        let grid = SpatialGrid::new(1024, std::f64::consts::PI).unwrap();
        let ct = profile(grid, |_| 1.0, |_| 0.0);
        let curve = reconstruct_curve(
            &ct,
            MetricSign::Euclidean,
            &Frame3::standard(MetricSign::Euclidean),
            [0.0; 3],
        )
        .unwrap();
        let v = binormal_velocity(&curve, MetricSign::Euclidean).unwrap();
        for (j, vj) in v.iter().enumerate() {
            let gap = v3::norm(v3::sub(*vj, [0.0, 1.0, 0.0]));
            assert!(gap <= 1e-6, "node {j}: velocity gap {gap:.3e}");
        }
    }

    #[test]
    fn velocity_converges_at_order_three_or_better() {
        // Non-trivial profile; compare |v| against c at the center node where
        // the closed-form magnitude |χ_x ∧ χ_xx| = c is exact for unit-speed
        // curves.
        let err_for = |n: usize| {
            let grid = SpatialGrid::new(n, 2.0).unwrap();
            let ct = profile(grid, |x| 1.0 + 0.4 * (0.9 * x).cos(), |x| 0.3 * x);
            let curve = reconstruct_curve(
                &ct,
                MetricSign::Euclidean,
                &Frame3::standard(MetricSign::Euclidean),
                [0.0; 3],
            )
            .unwrap();
            let v = binormal_velocity(&curve, MetricSign::Euclidean).unwrap();
            let mut worst: f64 = 0.0;
            for (j, vj) in v.iter().take(grid.n()).enumerate() {
                let c = ct.curvature()[j];
                worst = worst.max((v3::norm(*vj) - c).abs());
            }
            worst
        };
        let coarse = err_for(128);
        let fine = err_for(256);
        let order = (coarse / fine).log2();
        assert!(
            order >= 3.0,
            "velocity order {order:.2} (coarse {coarse:.3e}, fine {fine:.3e})"
        );
    }

    #[test]
    fn ragged_polyline_is_rejected_as_under_resolved() {
        let grid = SpatialGrid::new(8, 1.0).unwrap();
        let mut points = Vec::new();
        for j in 0..=8 {
            let x = j as f64 * 0.25;
            // Zig-zag: direction reverses every step.
            points.push([x, if j % 2 == 0 { 0.0 } else { 1.0 }, 0.0]);
        }
        let frames = vec![Frame3::standard(MetricSign::Euclidean); 9];
        let curve = Curve3::from_parts(grid, points, frames);
        assert!(matches!(
            binormal_velocity(&curve, MetricSign::Euclidean),
            Err(FilamentError::UnderResolved { .. })
        ));
    }

    #[test]
    fn negative_curvature_and_bad_seed_are_rejected() {
        let grid = SpatialGrid::new(16, 1.0).unwrap();
        let ct = CurvatureTorsion::new(grid, vec![-0.1; 16], vec![0.0; 16]).unwrap();
        assert!(matches!(
            reconstruct_curve(
                &ct,
                MetricSign::Euclidean,
                &Frame3::standard(MetricSign::Euclidean),
                [0.0; 3]
            ),
            Err(FilamentError::NegativeCurvature { index: 0, .. })
        ));

        let ct = CurvatureTorsion::new(grid, vec![0.1; 16], vec![0.0; 16]).unwrap();
        let skewed = Frame3 {
            t: [0.0, 0.1, 1.0],
            n: [1.0, 0.0, 0.0],
            b: [0.0, 1.0, 0.0],
        };
        assert!(matches!(
            reconstruct_curve(&ct, MetricSign::Euclidean, &skewed, [0.0; 3]),
            Err(FilamentError::SeedNotOrthonormal(_))
        ));
    }

    #[test]
    fn hyperbolic_reconstruction_rides_the_hyperboloid() {
        // With Minkowski signature and the standard seed, the tangent
        // indicatrix stays on ⟨γ,γ⟩₋ = -1 (two-sheeted hyperboloid) while
        // curvature feeds hyperbolic rotation.
        let grid = SpatialGrid::new(256, 1.5).unwrap();
        let ct = profile(grid, |_| 1.0, |_| 0.0);
        let curve = reconstruct_curve(
            &ct,
            MetricSign::Minkowski,
            &Frame3::standard(MetricSign::Minkowski),
            [0.0; 3],
        )
        .unwrap();
        // Closed form: T(s) = (sinh s, 0, cosh s).
        for (j, f) in curve.frames().iter().enumerate() {
            let s = if j == grid.n() {
                grid.half_width()
            } else {
                grid.node(j)
            };
            let exact = [s.sinh(), 0.0, s.cosh()];
            let gap = v3::norm(v3::sub(f.t, exact));
            assert!(gap <= 1e-9, "node {j}: tangent gap {gap:.3e}");
        }
    }
}
