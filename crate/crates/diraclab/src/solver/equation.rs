//! Equation families: the perturbation PDEs the split-step solver integrates.
//!
//! Every family is a special case of one master form for a perturbation `ψ`
//! around a known background `β(t,x)`:
//!
//! ```text
//!     σ i ∂_t ψ + ∂_xx ψ + ρ g(t) (|β+ψ|^α - |β|^α) (β+ψ) = 0,
//! ```
//!
//! with `σ = ±1` the time-direction sign (conformal-frame equations carry
//! `σ = -1` because the time inversion `s = 1/t` reverses the flow), and
//! `ρ = ±1` the focusing sign.
//!
//! | family                  | background β | g(t)          | σ  | constraints            |
//! |-------------------------|--------------|---------------|----|------------------------|
//! | `DirectPerturbation`    | f_a(t,x)     | 1             | +1 | 0 ≤ α < 2, t > 0       |
//! | `ConformalPerturbation` | a            | t^{α/2 - 2}   | -1 | 0 ≤ α < 2, t > 0       |
//! | `CriticalConformal`     | a            | 1/t           | -1 | α = 2, t > 0           |
//! | `GrossPitaevskii`       | 1            | 1             | +1 | α = 2, a = 1, defocusing |
//! | `ConstantCubic`         | 0            | 1             | +1 | α = 2, a = 0           |
//!
//! `α = 0` is allowed in the perturbation families and switches the
//! nonlinearity off exactly (`|β+ψ|⁰ - |β|⁰ ≡ 0`): the linear benchmark.
//!
//! The split-step scheme needs `∫g` and `∫g·|β|^α` over each step; both are
//! given in closed form here (for the direct family the latter is an exact
//! increment of the self-similar phase `A`), so the nonlinear substep carries
//! no quadrature error in time — all time-discretization error comes from the
//! operator splitting itself.

use num_complex::Complex64;

use super::SolverError;
use crate::closed_forms::{self, SelfSimilarParams, Sign};

/// The five supported perturbation equations. See the module header for the
/// master form and the per-family parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// Perturbation of the self-similar solution in physical variables,
    /// gauged by the accumulated phase `A(t)`; the background is the free
    /// point-mass profile `f_a(t,x)`.
    DirectPerturbation,
    /// Perturbation of the constant background `a` in conformal variables,
    /// subcritical exponent `α < 2`.
    ConformalPerturbation,
    /// The critical (`α = 2`) conformal equation with the `1/t` coefficient.
    CriticalConformal,
    /// Gross–Pitaevskii: defocusing cubic flow of `ψ = 1 + u` around the
    /// constant background 1, no time coefficient.
    GrossPitaevskii,
    /// Plain cubic Schrödinger flow with zero background (plane-wave and
    /// convergence benchmarks live here).
    ConstantCubic,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Family::DirectPerturbation => "direct_perturbation",
            Family::ConformalPerturbation => "conformal_perturbation",
            Family::CriticalConformal => "critical_conformal",
            Family::GrossPitaevskii => "gross_pitaevskii",
            Family::ConstantCubic => "constant_cubic",
        };
        write!(f, "{name}")
    }
}

/// Full parameterization of one PDE instance: family, complex amplitude `a`,
/// exponent `α`, focusing sign. The spatial dimension is fixed at 1 for all
/// solver scenarios; the time-direction sign `σ` is derived from the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationSpec {
    family: Family,
    a: Complex64,
    alpha: f64,
    sign: Sign,
}

impl EquationSpec {
    /// Validated constructor. Family constraints are rejected, not silently
    /// repaired: the critical family fixes `α = 2`; Gross–Pitaevskii fixes
    /// `α = 2`, background 1, and the defocusing sign; the constant-cubic
    /// family fixes `α = 2` and zero background; the subcritical perturbation
    /// families require `0 ≤ α < 2`.
    pub fn new(family: Family, a: Complex64, alpha: f64, sign: Sign) -> Result<Self, SolverError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(SolverError::InvalidEquation(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(SolverError::InvalidEquation(format!(
                "amplitude must be finite, got {a}"
            )));
        }
        match family {
            Family::DirectPerturbation | Family::ConformalPerturbation => {
                if alpha >= 2.0 {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} is subcritical in one dimension: alpha must be < 2, got {alpha} \
                         (use the critical_conformal family for alpha = 2)"
                    )));
                }
            }
            Family::CriticalConformal => {
                if alpha != 2.0 {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} fixes alpha = 2 in one dimension, got {alpha}"
                    )));
                }
            }
            Family::GrossPitaevskii => {
                if alpha != 2.0 {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} fixes alpha = 2, got {alpha}"
                    )));
                }
                if a != Complex64::new(1.0, 0.0) {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} fixes the background amplitude at 1, got {a}"
                    )));
                }
                if sign != Sign::Defocusing {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} is defocusing by definition"
                    )));
                }
            }
            Family::ConstantCubic => {
                if alpha != 2.0 {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} fixes alpha = 2, got {alpha}"
                    )));
                }
                if a != Complex64::new(0.0, 0.0) {
                    return Err(SolverError::InvalidEquation(format!(
                        "family {family} has zero background; set a = 0 (got {a})"
                    )));
                }
            }
        }
        Ok(Self {
            family,
            a,
            alpha,
            sign,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The time-direction sign `σ`: `-1` for the conformal-frame equations,
    /// `+1` otherwise.
    pub fn sigma(&self) -> f64 {
        match self.family {
            Family::ConformalPerturbation | Family::CriticalConformal => -1.0,
            _ => 1.0,
        }
    }

    /// The focusing sign `ρ` (+1 focusing, -1 defocusing).
    pub fn rho(&self) -> f64 {
        self.sign.rho()
    }

    /// Whether the equation's coefficients are singular at `t ≤ 0`, which
    /// restricts meshes to strictly positive times.
    pub fn requires_positive_time(&self) -> bool {
        matches!(
            self.family,
            Family::DirectPerturbation | Family::ConformalPerturbation | Family::CriticalConformal
        )
    }

    /// Whether the background depends on time (only the direct family's
    /// does).
    pub fn background_is_static(&self) -> bool {
        !matches!(self.family, Family::DirectPerturbation)
    }

    /// The background field `β(t,x)`.
    pub fn background(&self, t: f64, x: f64) -> Complex64 {
        match self.family {
            Family::DirectPerturbation => {
                let p = self.selfsim_params();
                // t > 0 is enforced by the mesh validation for this family.
                closed_forms::eval_fa(&p, t, &[x]).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }
            Family::ConformalPerturbation | Family::CriticalConformal => self.a,
            Family::GrossPitaevskii => Complex64::new(1.0, 0.0),
            Family::ConstantCubic => Complex64::new(0.0, 0.0),
        }
    }

    /// The time coefficient `g(t)` multiplying the nonlinearity.
    pub fn time_coefficient(&self, t: f64) -> f64 {
        match self.family {
            Family::ConformalPerturbation => t.powf(self.alpha / 2.0 - 2.0),
            Family::CriticalConformal => 1.0 / t,
            _ => 1.0,
        }
    }

    /// Exact `∫_{t0}^{t1} g(s) ds`.
    pub fn coefficient_integral(&self, t0: f64, t1: f64) -> f64 {
        match self.family {
            Family::ConformalPerturbation => {
                let beta = self.alpha / 2.0 - 1.0;
                (t1.powf(beta) - t0.powf(beta)) / beta
            }
            Family::CriticalConformal => (t1 / t0).ln(),
            _ => t1 - t0,
        }
    }

    /// Exact `∫_{t0}^{t1} g(s)·|β(s)|^α ds`, the background contribution to
    /// the nonlinear phase. For the direct family this is an increment of the
    /// self-similar phase `A`; for the constant backgrounds it reduces to
    /// `|β|^α · ∫g`.
    pub fn background_phase_integral(&self, t0: f64, t1: f64) -> f64 {
        match self.family {
            Family::DirectPerturbation => {
                let p = self.selfsim_params();
                match (
                    closed_forms::eval_phase_a(&p, t1),
                    closed_forms::eval_phase_a(&p, t0),
                ) {
                    (Ok(a1), Ok(a0)) => a1 - a0,
                    _ => f64::NAN,
                }
            }
            Family::ConformalPerturbation | Family::CriticalConformal => {
                self.a.norm().powf(self.alpha) * self.coefficient_integral(t0, t1)
            }
            Family::GrossPitaevskii => t1 - t0,
            Family::ConstantCubic => 0.0,
        }
    }

    /// The weight on the quartic potential inside the energy functional,
    /// `g(t)/4`; see the diagnostics module for the full energy expression.
    pub fn potential_weight(&self, t: f64) -> f64 {
        self.time_coefficient(t) / 4.0
    }

    /// The weight `-g'(t)/4` in the energy dissipation law
    /// `dE/dt = ρ·(-g'(t)/4)·P(t)` (valid for the quartic, `α = 2`,
    /// families). Zero when `g` is constant, `1/(4t²)` for the critical
    /// family.
    pub fn dissipation_weight(&self, t: f64) -> f64 {
        match self.family {
            Family::ConformalPerturbation => {
                let expo = self.alpha / 2.0 - 2.0;
                -expo * t.powf(expo - 1.0) / 4.0
            }
            Family::CriticalConformal => 1.0 / (4.0 * t * t),
            _ => 0.0,
        }
    }

    /// Self-similar parameter block matching this equation (dimension 1).
    pub fn selfsim_params(&self) -> SelfSimilarParams {
        SelfSimilarParams {
            a: self.a,
            alpha: self.alpha,
            dim: 1,
            sign: self.sign,
        }
    }

    /// `|z|^α` with the common exponents special-cased (hot path of the
    /// nonlinear substep).
    pub fn modulus_power(&self, z: Complex64) -> f64 {
        if self.alpha == 2.0 {
            z.norm_sqr()
        } else if self.alpha == 1.0 {
            z.norm()
        } else if self.alpha == 0.0 {
            1.0
        } else {
            z.norm().powf(self.alpha)
        }
    }
}
