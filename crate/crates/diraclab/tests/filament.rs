//! Curve geometry: frame transport against exact circles and lines, the
//! curvature-to-wavefunction bridge against its closed form, and the corner
//! extrapolation against the analytic limit tangents.

mod common;

use diraclab::filament::{
    binormal_velocity, corner_tangents, hasimoto, phase_locked_times, reconstruct_curve,
    self_similar_profile, sm_invariant, Curve3, CurvatureTorsion, Frame3, MetricSign,
    CORNER_SPREAD_TOL,
};
use diraclab::SpatialGrid;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sum3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Circle of curvature `c` (radius 1/c) traversed once: arclength 2L = 2π/c.
fn circle(n: usize, c: f64) -> Curve3 {
    let grid = SpatialGrid::new(n, PI / c).unwrap();
    let curv = vec![c; n];
    let tau = vec![0.0; n];
    let ct = CurvatureTorsion::new(grid, curv, tau).unwrap();
    reconstruct_curve(
        &ct,
        MetricSign::Euclidean,
        &Frame3::standard(MetricSign::Euclidean),
        [0.0; 3],
    )
    .unwrap()
}

#[test]
fn circle_reconstruction_closes_at_fourth_order() {
    let gap = |n: usize| circle(n, 2.0).closure_gap();
    let (coarse, fine) = (gap(512), gap(1024));
    let ratio = coarse / fine;
    assert!(
        (11.2..=20.8).contains(&ratio),
        "doubling ratio {ratio} (gaps {coarse:.3e} -> {fine:.3e}) is not fourth order"
    );
    assert!(gap(4096) <= 1e-6, "gap {} at n = 4096", gap(4096));
}

#[test]
fn circle_points_stay_on_the_circle_and_velocity_is_twice_the_binormal() {
    let n = 1024;
    let c = 2.0;
    let curve = circle(n, c);

    // The frame seed T = e₃, N = e₁ puts the circle in the e₁–e₃ plane with
    // center at origin + N/c; every point keeps distance 1/c from it.
    let center = sum3([0.0; 3], [1.0 / c, 0.0, 0.0]);
    for p in curve.points() {
        let r = norm3([p[0] - center[0], p[1] - center[1], p[2] - center[2]]);
        assert!((r - 1.0 / c).abs() < 1e-9, "radius {r}");
    }

    // Curvature-flow velocity c·B: the binormal is the constant e₂.
    let v = binormal_velocity(&curve, MetricSign::Euclidean).unwrap();
    for (j, w) in v.iter().enumerate() {
        assert!(
            (w[1] - c).abs() < 1e-6 && w[0].abs() < 1e-6 && w[2].abs() < 1e-6,
            "node {j}: velocity {w:?} should be (0, {c}, 0)"
        );
    }
}

#[test]
fn straight_line_comes_back_for_zero_curvature_and_does_not_move() {
    let grid = SpatialGrid::new(256, 2.0).unwrap();
    let ct = CurvatureTorsion::new(grid, vec![0.0; 256], vec![0.0; 256]).unwrap();
    let curve = reconstruct_curve(
        &ct,
        MetricSign::Euclidean,
        &Frame3::standard(MetricSign::Euclidean),
        [0.0; 3],
    )
    .unwrap();
    for t in curve.tangents() {
        assert!(norm3([t[0], t[1], t[2] - 1.0]) < 1e-12);
    }
    let v = binormal_velocity(&curve, MetricSign::Euclidean).unwrap();
    for w in &v {
        assert!(norm3(*w) < 1e-9);
    }
}

#[test]
fn curvature_to_wavefunction_map_hits_the_chirp_closed_form() {
    // The self-similar pair (c₀/√t, x/2t) maps to the quadratic chirp
    // (c₀/√t)·e^{ix²/4t}; the phase quadrature is exact for linear torsion.
    let grid = SpatialGrid::new(2048, 10.24).unwrap();
    let (c0, t) = (0.9, 1.0);
    let ct = self_similar_profile(c0, t, grid).unwrap();
    let psi = hasimoto(&ct);
    let mut worst: f64 = 0.0;
    for (j, x) in grid.nodes().iter().enumerate() {
        let want = Complex64::from_polar(c0 / t.sqrt(), x * x / (4.0 * t));
        worst = worst.max((psi[j] - want).norm());
    }
    assert!(worst <= 1e-6, "worst pointwise gap {worst:.3e}");
}

#[test]
fn wavefunction_modulus_is_the_curvature_for_any_profile() {
    let grid = SpatialGrid::new(512, 6.0).unwrap();
    let c: Vec<f64> = grid.nodes().iter().map(|x| 0.5 + 0.3 * (x * 0.7).cos()).collect();
    let tau: Vec<f64> = grid.nodes().iter().map(|x| (x * 0.4).sin()).collect();
    let ct = CurvatureTorsion::new(grid, c.clone(), tau).unwrap();
    for (p, cj) in hasimoto(&ct).iter().zip(&c) {
        assert!((p.norm() - cj).abs() < 1e-14);
    }
}

#[test]
fn locked_times_solve_their_phase_equation() {
    let l = 1.0;
    let m0 = 3.0;
    for metric in [MetricSign::Euclidean, MetricSign::Minkowski] {
        let eps = metric.tangent_square();
        let times = phase_locked_times(l, 0.4, metric, 3, 5).unwrap();
        assert_eq!(times.len(), 5);
        for (k, pair) in times.windows(2).enumerate() {
            assert!(pair[1] < pair[0], "ladder not decreasing at level {k}");
        }
        for (k, &t) in times.iter().enumerate() {
            assert!(t > 0.0);
            let lock = l * l / (4.0 * t) - eps * 0.08 * t.ln();
            let target = 2.0 * PI * m0 * (1u64 << k) as f64;
            assert!(
                (lock - target).abs() <= 1e-9 * target,
                "level {k}: lock value {lock} vs {target}"
            );
        }
    }
}

#[test]
fn corner_tangents_match_the_analytic_limit() {
    let grid = SpatialGrid::new(8192, 1.0).unwrap();
    for &c0 in &[0.2, 0.5, 1.0] {
        let times = phase_locked_times(1.0, c0, MetricSign::Euclidean, 3, 5).unwrap();
        let est = corner_tangents(c0, MetricSign::Euclidean, &times, grid).unwrap();

        assert!(est.converged, "c0 = {c0}: spread {}", est.spread);
        assert!(est.spread <= CORNER_SPREAD_TOL);

        // Limit angle 2·arccos(e^{-πc₀²/2}) and symmetric-part modulus
        // |A₁+A₂| = 2e^{-πc₀²/2}.
        let damped = (-PI * c0 * c0 / 2.0).exp();
        let angle_want = 2.0 * damped.acos();
        let sum_want = 2.0 * damped;
        let angle_dev = (est.angle - angle_want).abs() / angle_want;
        let sum_dev = (norm3(sum3(est.a1, est.a2)) - sum_want).abs() / sum_want;
        assert!(
            angle_dev <= 5e-3,
            "c0 = {c0}: angle {} vs {angle_want} (dev {angle_dev:.2e})",
            est.angle
        );
        assert!(
            sum_dev <= 5e-3,
            "c0 = {c0}: |A1+A2| dev {sum_dev:.2e} from {sum_want}"
        );

        // Unit tangents in the Euclidean signature.
        assert!((norm3(est.a1) - 1.0).abs() < 1e-3);
        assert!((norm3(est.a2) - 1.0).abs() < 1e-3);
    }
}

#[test]
fn minkowski_corner_opens_at_the_hyperbolic_angle() {
    let grid = SpatialGrid::new(8192, 1.0).unwrap();
    let c0 = 0.5;
    let times = phase_locked_times(1.0, c0, MetricSign::Minkowski, 3, 5).unwrap();
    let est = corner_tangents(c0, MetricSign::Minkowski, &times, grid).unwrap();

    assert!(est.converged, "spread {}", est.spread);

    // The hyperbolic limit angle 2·arccosh(e^{+πc₀²/2}).
    let grown = (PI * c0 * c0 / 2.0).exp();
    let angle_want = 2.0 * grown.acosh();
    let dev = (est.angle - angle_want).abs() / angle_want;
    assert!(dev <= 5e-3, "angle {} vs {angle_want} (dev {dev:.2e})", est.angle);

    // Limit tangents stay timelike-normalized: ⟨A, A⟩ = -1.
    let m = MetricSign::Minkowski;
    assert!((m.inner(est.a1, est.a1) + 1.0).abs() < 1e-3);
    assert!((m.inner(est.a2, est.a2) + 1.0).abs() < 1e-3);
}

#[test]
fn indicatrix_invariant_is_constant_in_both_signatures() {
    let grid = SpatialGrid::new(4096, 1.0).unwrap();
    for metric in [MetricSign::Euclidean, MetricSign::Minkowski] {
        let times = phase_locked_times(1.0, 0.4, metric, 3, 4).unwrap();
        let t = times[0];
        let ct = self_similar_profile(0.4, t, grid).unwrap();
        let curve =
            reconstruct_curve(&ct, metric, &Frame3::standard(metric), [0.0; 3]).unwrap();
        let vals = sm_invariant(&curve.tangents(), metric);
        let target = metric.tangent_square();
        let drift = vals
            .iter()
            .map(|v| (v - target).abs())
            .fold(0.0f64, f64::max);
        assert!(drift <= 1e-8, "{metric:?}: invariant drift {drift:.3e}");
    }
}

#[test]
fn geometry_guards_reject_inconsistent_input() {
    let grid = SpatialGrid::new(64, 2.0).unwrap();

    // Length mismatch and negative curvature.
    assert!(CurvatureTorsion::new(grid, vec![1.0; 63], vec![0.0; 64]).is_err());
    let negative = CurvatureTorsion::new(grid, vec![-1.0; 64], vec![0.0; 64]).unwrap();
    assert!(reconstruct_curve(
        &negative,
        MetricSign::Euclidean,
        &Frame3::standard(MetricSign::Euclidean),
        [0.0; 3],
    )
    .is_err());

    // A non-orthonormal seed frame is refused.
    let skew = Frame3 {
        t: [0.0, 0.0, 2.0],
        n: [1.0, 0.0, 0.0],
        b: [0.0, 1.0, 0.0],
    };
    let ct = CurvatureTorsion::new(grid, vec![1.0; 64], vec![0.0; 64]).unwrap();
    assert!(reconstruct_curve(&ct, MetricSign::Euclidean, &skew, [0.0; 3]).is_err());

    // Corner extrapolation needs at least three strictly decreasing times.
    assert!(corner_tangents(0.5, MetricSign::Euclidean, &[1.0, 0.5], grid).is_err());
    assert!(corner_tangents(0.5, MetricSign::Euclidean, &[1.0, 0.5, 0.7], grid).is_err());
    assert!(phase_locked_times(1.0, 0.5, MetricSign::Euclidean, 0, 5).is_err());
}
