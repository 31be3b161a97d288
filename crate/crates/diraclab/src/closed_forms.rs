//! Closed-form solutions and exact symmetry transforms.
//!
//! The object at the center of the crate is the self-similar solution of
//!
//! ```text
//!     i ∂_t u + Δu ± |u|^α u = 0,        u(0,·) = a·δ₀,
//! ```
//!
//! which is an explicit product of the free point-mass profile and a real
//! phase:
//!
//! ```text
//!     u(t,x) = f_a(t,x) · exp(± i A(t)),
//!     f_a(t,x) = a · exp(i|x|²/4t) / (it)^{d/2},
//!     A(t) = |a|^α t^{1-αd/2} / (1-αd/2)       (αd ≠ 2),
//!     A(t) = |a|^{2/d} · log t                 (αd = 2, the critical power).
//! ```
//!
//! `(it)^{d/2}` is taken on the principal branch; for `t > 0` this is
//! `t^{d/2}·e^{iπd/4}`. Any other fixed branch changes a global constant
//! phase only, which no observable in this crate depends on.
//!
//! The module also provides the two exact transforms used throughout:
//!
//! * the Galilean boost `u ↦ e^{-it|ν|² + iν·x} u(t, x - 2νt)`, which fixes
//!   the self-similar family pointwise, and
//! * the conformal time inversion `f ↦ e^{i|x|²/4t}/(it)^{d/2} · f(1/t, x/t)`,
//!   which bridges the point-mass frame and the constant-background frame the
//!   solver integrates in,
//!
//! together with `reconstruct_u`, which maps a solver field at conformal time
//! `s = 1/t` back to the physical solution at time `t`.

use num_complex::Complex64;
use thiserror::Error;

use crate::solver::FieldState;

/// Absolute tolerance on `α·d - 2` under which the critical (logarithmic)
/// phase branch is selected. Floating-point inputs cannot represent exact
/// criticality, so the threshold is explicit and documented here; the phase
/// is continuous across the switch in the gauge-invariant sense (increments
/// `A(t) - A(t₀)` match to far better than the tolerances used anywhere in
/// the crate).
pub const CRITICAL_DETECTION_TOL: f64 = 1e-12;

/// Errors from closed-form evaluation.
#[derive(Debug, Error)]
pub enum ClosedFormError {
    /// The self-similar family is evaluable only at strictly positive times;
    /// `t = 0` is the point-mass itself.
    #[error("closed form requires t > 0, got t = {0}")]
    NonPositiveTime(f64),
    /// A spatial argument of the wrong dimension was supplied.
    #[error("expected a point in dimension {expected}, got {got} coordinates")]
    DimensionMismatch { expected: usize, got: usize },
    /// Parameters violate a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An interpolation point left the sampled domain.
    #[error("point {0} lies outside the sampled domain [{1}, {2})")]
    OutOfDomain(f64, f64, f64),
}

/// Focusing / defocusing flag: the sign in front of the nonlinearity.
///
/// `Focusing` is the `+` in `i∂_t u + Δu + |u|^α u = 0`; `Defocusing` is `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// The numeric sign `ρ` carried by the nonlinear term: `+1` focusing,
    /// `-1` defocusing.
    pub fn rho(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Focusing => write!(f, "focusing"),
            Sign::Defocusing => write!(f, "defocusing"),
        }
    }
}

/// Parameters of one self-similar solution: amplitude `a`, nonlinearity
/// exponent `α ≥ 0`, spatial dimension `d ≥ 1`, and the focusing sign.
///
/// Criticality is always *derived* from `(α, d)`, never stored: the power is
/// subcritical iff `α < 2/d` and critical iff `α = 2/d` (within
/// [`CRITICAL_DETECTION_TOL`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarParams {
    pub a: Complex64,
    pub alpha: f64,
    pub dim: u32,
    pub sign: Sign,
}

impl SelfSimilarParams {
    /// Validated constructor: `α ≥ 0`, `d ≥ 1`, finite amplitude.
    pub fn new(a: Complex64, alpha: f64, dim: u32, sign: Sign) -> Result<Self, ClosedFormError> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(ClosedFormError::InvalidParameter(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if dim < 1 {
            return Err(ClosedFormError::InvalidParameter(
                "dimension must be >= 1".into(),
            ));
        }
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(ClosedFormError::InvalidParameter(format!(
                "amplitude must be finite, got {a}"
            )));
        }
        Ok(Self { a, alpha, dim, sign })
    }

    /// `α·d` within [`CRITICAL_DETECTION_TOL`] of 2: the logarithmic-phase power.
    pub fn is_critical(&self) -> bool {
        (self.alpha * self.dim as f64 - 2.0).abs() <= CRITICAL_DETECTION_TOL
    }

    /// `α < 2/d` (and not within the critical detection band).
    pub fn is_subcritical(&self) -> bool {
        !self.is_critical() && self.alpha * (self.dim as f64) < 2.0
    }
}

/// A Galilean boost velocity `ν ∈ ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalileanBoost {
    nu: Vec<f64>,
}

impl GalileanBoost {
    /// Validated constructor: all components finite.
    pub fn new(nu: Vec<f64>) -> Result<Self, ClosedFormError> {
        if nu.is_empty() {
            return Err(ClosedFormError::InvalidParameter(
                "boost velocity must have at least one component".into(),
            ));
        }
        if nu.iter().any(|v| !v.is_finite()) {
            return Err(ClosedFormError::InvalidParameter(
                "boost velocity components must be finite".into(),
            ));
        }
        Ok(Self { nu })
    }

    pub fn components(&self) -> &[f64] {
        &self.nu
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn check_dim(p: &SelfSimilarParams, x: &[f64]) -> Result<(), ClosedFormError> {
    if x.len() != p.dim as usize {
        return Err(ClosedFormError::DimensionMismatch {
            expected: p.dim as usize,
            got: x.len(),
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<(), ClosedFormError> {
    if !(t > 0.0) {
        return Err(ClosedFormError::NonPositiveTime(t));
    }
    Ok(())
}

/// The free point-mass profile `f_a(t,x) = a·e^{i|x|²/4t}/(it)^{d/2}`.
///
/// Assembled in polar form so that the modulus is exactly `|a|·t^{-d/2}` up
/// to a few ulp: the unimodular factor is `cis(|x|²/4t − πd/4)` and the
/// magnitude never passes through a complex division.
pub fn eval_fa(p: &SelfSimilarParams, t: f64, x: &[f64]) -> Result<Complex64, ClosedFormError> {
    check_time(t)?;
    check_dim(p, x)?;
    let d = p.dim as f64;
    let scale = t.powf(-d / 2.0);
    let phase = norm_sq(x) / (4.0 * t) - std::f64::consts::FRAC_PI_4 * d;
    Ok(p.a * Complex64::from_polar(scale, phase))
}

/// The accumulated nonlinear phase `A(t)`:
///
/// ```text
///     A(t) = |a|^α t^{1-αd/2} / (1-αd/2)    (αd ≠ 2),
///     A(t) = |a|^{2/d} log t                (αd = 2).
/// ```
///
/// Case selection tests `|αd - 2| ≤ CRITICAL_DETECTION_TOL`.
pub fn eval_phase_a(p: &SelfSimilarParams, t: f64) -> Result<f64, ClosedFormError> {
    check_time(t)?;
    let d = p.dim as f64;
    let amp = p.a.norm();
    if p.is_critical() {
        Ok(amp.powf(2.0 / d) * t.ln())
    } else {
        let beta = 1.0 - p.alpha * d / 2.0;
        Ok(amp.powf(p.alpha) * t.powf(beta) / beta)
    }
}

/// The self-similar solution `u(t,x) = f_a(t,x)·e^{±iA(t)}`, the `±` being
/// the focusing sign.
pub fn eval_u_selfsim(
    p: &SelfSimilarParams,
    t: f64,
    x: &[f64],
) -> Result<Complex64, ClosedFormError> {
    let fa = eval_fa(p, t, x)?;
    let a_phase = eval_phase_a(p, t)?;
    Ok(fa * Complex64::cis(p.sign.rho() * a_phase))
}

/// The Galilean boost of a space-time field:
///
/// ```text
///     u_ν(t,x) = e^{-it|ν|² + iν·x} · u(t, x - 2νt).
/// ```
///
/// Takes the field as a callable and evaluates the boosted field at one
/// point; evaluation failures of `u` propagate.
pub fn galilean_transform<F>(
    u: F,
    boost: &GalileanBoost,
    t: f64,
    x: &[f64],
) -> Result<Complex64, ClosedFormError>
where
    F: Fn(f64, &[f64]) -> Result<Complex64, ClosedFormError>,
{
    if boost.dim() != x.len() {
        return Err(ClosedFormError::DimensionMismatch {
            expected: boost.dim(),
            got: x.len(),
        });
    }
    let nu = boost.components();
    let shifted: Vec<f64> = x.iter().zip(nu).map(|(xi, vi)| xi - 2.0 * vi * t).collect();
    let phase = -t * norm_sq(nu) + dot(nu, x);
    Ok(Complex64::cis(phase) * u(t, &shifted)?)
}

/// The conformal (pseudo-conformal) transform
///
/// ```text
///     T(f)(t,x) = e^{i|x|²/4t}/(it)^{d/2} · f(1/t, x/t),    t > 0.
/// ```
///
/// Sends solutions of the free flow to solutions of the free flow and maps
/// the constant field `a` to the point-mass profile `f_a`.
pub fn conformal_transform<F>(
    f: F,
    dim: u32,
    t: f64,
    x: &[f64],
) -> Result<Complex64, ClosedFormError>
where
    F: Fn(f64, &[f64]) -> Result<Complex64, ClosedFormError>,
{
    check_time(t)?;
    if x.len() != dim as usize {
        return Err(ClosedFormError::DimensionMismatch {
            expected: dim as usize,
            got: x.len(),
        });
    }
    let d = dim as f64;
    let scale = t.powf(-d / 2.0);
    let phase = norm_sq(x) / (4.0 * t) - std::f64::consts::FRAC_PI_4 * d;
    let y: Vec<f64> = x.iter().map(|xi| xi / t).collect();
    Ok(Complex64::from_polar(scale, phase) * f(1.0 / t, &y)?)
}

/// Reconstruct the physical solution at `(t, x)` from a solver field at
/// conformal time `s = 1/t` (one spatial dimension):
///
/// ```text
///     u(t,x) = u_selfsim(t,x) + e^{ix²/4t}/(it)^{1/2} · e^{±iA(t)} · ε(1/t, x/t).
/// ```
///
/// The field is sampled by band-limited (trigonometric) interpolation at
/// `y = x/t`, which must lie inside the state's periodic cell; the state is
/// interpreted as the conformal-frame perturbation at `s = 1/t` (its own time
/// label is not consulted).
pub fn reconstruct_u(
    eps: &FieldState,
    p: &SelfSimilarParams,
    t: f64,
    x: f64,
) -> Result<Complex64, ClosedFormError> {
    check_time(t)?;
    if p.dim != 1 {
        return Err(ClosedFormError::InvalidParameter(
            "reconstruct_u is defined for dimension 1".into(),
        ));
    }
    let y = x / t;
    let half_width = eps.grid().half_width();
    if !(-half_width..half_width).contains(&y) {
        return Err(ClosedFormError::OutOfDomain(y, -half_width, half_width));
    }
    let selfsim = eval_u_selfsim(p, t, &[x])?;
    let a_phase = eval_phase_a(p, t)?;
    let prefactor = Complex64::from_polar(
        t.powf(-0.5),
        x * x / (4.0 * t) - std::f64::consts::FRAC_PI_4 + p.sign.rho() * a_phase,
    );
    Ok(selfsim + prefactor * eps.interpolate(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: Complex64, alpha: f64, dim: u32, sign: Sign) -> SelfSimilarParams {
        SelfSimilarParams::new(a, alpha, dim, sign).unwrap()
    }

    #[test]
    fn fa_at_origin_unit_time_is_eighth_root() {
        // a=1, d=1, t=1, x=0: 1/(i)^{1/2} = e^{-iπ/4}.
        let p = params(Complex64::new(1.0, 0.0), 1.0, 1, Sign::Focusing);
        let v = eval_fa(&p, 1.0, &[0.0]).unwrap();
        let expect = Complex64::cis(-std::f64::consts::FRAC_PI_4);
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn fa_is_linear_in_amplitude() {
        let p = params(Complex64::new(0.0, 0.0), 1.5, 2, Sign::Defocusing);
        let v = eval_fa(&p, 0.7, &[1.0, -2.0]).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fa_modulus_is_amplitude_over_sqrt_t() {
        // |a|/√t = 2/2 = 1 for a=2, d=1, t=4, independent of x.
        let p = params(Complex64::new(2.0, 0.0), 1.0, 1, Sign::Focusing);
        for &x in &[-3.0, 0.0, 0.421, 17.0] {
            let v = eval_fa(&p, 4.0, &[x]).unwrap();
            assert!((v.norm() - 1.0).abs() < 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn fa_rejects_the_delta_limit_point() {
        let p = params(Complex64::new(1.0, 0.0), 1.0, 1, Sign::Focusing);
        assert!(matches!(
            eval_fa(&p, 0.0, &[0.0]),
            Err(ClosedFormError::NonPositiveTime(_))
        ));
        assert!(eval_fa(&p, -1.0, &[0.0]).is_err());
    }

    #[test]
    fn phase_a_subcritical_value() {
        // a=1, α=1, d=1, t=4: 4^{1/2}/(1/2) = 4.
        let p = params(Complex64::new(1.0, 0.0), 1.0, 1, Sign::Focusing);
        assert!((eval_phase_a(&p, 4.0).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn phase_a_critical_vanishes_at_unit_time() {
        for (alpha, dim) in [(2.0, 1), (1.0, 2), (0.5, 4)] {
            let p = params(Complex64::new(0.3, 0.4), alpha, dim, Sign::Defocusing);
            assert!(p.is_critical());
            assert_eq!(eval_phase_a(&p, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn phase_a_critical_at_e_is_amplitude_squared() {
        let p = params(Complex64::new(1.0, 0.0), 2.0, 1, Sign::Focusing);
        let v = eval_phase_a(&p, std::f64::consts::E).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn selfsim_modulus_matches_free_profile() {
        for alpha in [0.5, 1.0, 2.0] {
            for sign in [Sign::Focusing, Sign::Defocusing] {
                let p = params(Complex64::new(1.0, 0.0), alpha, 1, sign);
                for &x in &[-1.0, 0.0, 2.5] {
                    let v = eval_u_selfsim(&p, 1.0, &[x]).unwrap();
                    assert!((v.norm() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_boost_is_identity() {
        let p = params(Complex64::new(0.5, 0.5), 1.0, 1, Sign::Focusing);
        let boost = GalileanBoost::new(vec![0.0]).unwrap();
        let field = |t: f64, x: &[f64]| eval_u_selfsim(&p, t, x);
        let (t, x) = (0.8, [1.3]);
        let boosted = galilean_transform(field, &boost, t, &x).unwrap();
        assert!((boosted - field(t, &x).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn selfsim_is_a_galilean_fixed_point() {
        let p = params(Complex64::new(1.0, 0.0), 1.0, 1, Sign::Focusing);
        let boost = GalileanBoost::new(vec![0.7]).unwrap();
        let field = |t: f64, x: &[f64]| eval_u_selfsim(&p, t, x);
        let (t, x) = (1.0, [0.2]);
        let boosted = galilean_transform(field, &boost, t, &x).unwrap();
        let direct = field(t, &x).unwrap();
        assert!((boosted - direct).norm() / direct.norm() < 1e-12);
    }

    #[test]
    fn boost_shifts_plane_wave_frequency() {
        // e^{i(kx - k²t)} boosted by ν becomes e^{i((k+ν)x - (k+ν)²t)}.
        let k = 1.3;
        let nu = 0.7;
        let wave = move |t: f64, x: &[f64]| Ok(Complex64::cis(k * x[0] - k * k * t));
        let boost = GalileanBoost::new(vec![nu]).unwrap();
        let (t, x) = (0.9, [-0.4f64]);
        let boosted = galilean_transform(wave, &boost, t, &x).unwrap();
        let kb = k + nu;
        let expect = Complex64::cis(kb * x[0] - kb * kb * t);
        assert!((boosted - expect).norm() < 1e-13);
    }

    #[test]
    fn conformal_image_of_constant_is_free_profile() {
        let a = Complex64::new(0.8, -0.3);
        let p = params(a, 1.0, 1, Sign::Focusing);
        let constant = move |_t: f64, _x: &[f64]| Ok(a);
        for &(t, x) in &[(0.5, 0.3), (2.0, -1.7), (7.3, 0.0)] {
            let lhs = conformal_transform(constant, 1, t, &[x]).unwrap();
            let rhs = eval_fa(&p, t, &[x]).unwrap();
            assert!((lhs - rhs).norm() < 1e-14 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn conformal_image_of_zero_is_zero() {
        let zero = |_t: f64, _x: &[f64]| Ok(Complex64::new(0.0, 0.0));
        assert_eq!(
            conformal_transform(zero, 1, 3.0, &[1.0]).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn conformal_image_of_phased_constant_is_selfsim() {
        // f(s,y) = e^{iρA(1/s)}·a maps to the full self-similar solution.
        let p = params(Complex64::new(1.0, 0.0), 1.0, 1, Sign::Defocusing);
        let rho = p.sign.rho();
        let pc = p;
        let phased = move |s: f64, _y: &[f64]| {
            Ok(pc.a * Complex64::cis(rho * eval_phase_a(&pc, 1.0 / s).unwrap()))
        };
        for &(t, x) in &[(0.7, 0.4), (3.0, -2.0)] {
            let lhs = conformal_transform(phased, 1, t, &[x]).unwrap();
            let rhs = eval_u_selfsim(&p, t, &[x]).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
