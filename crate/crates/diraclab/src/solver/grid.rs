//! Uniform periodic spatial grids and the FFT workspace built over them.
//!
//! The periodic cell is `[-L, L)` sampled at `n` equispaced nodes
//! (`n` a power of two, at least 8):
//!
//! ```text
//!     x_j = -L + 2Lj/n,          j = 0, …, n-1,
//!     ξ_k = πk/L,                k = -n/2, …, n/2 - 1.
//! ```
//!
//! The discrete transform convention: with `F = DFT(ψ)` (unnormalized,
//! rustfft's convention), the trigonometric coefficients of
//! `ψ(x) = Σ_k c_k e^{iξ_k x}` are
//!
//! ```text
//!     c_k = (-1)^k F_{k mod n} / n,
//! ```
//!
//! the alternating sign coming from the half-cell shift of the first node to
//! `-L`. Diagonal Fourier multipliers are insensitive to that sign (it
//! cancels between analysis and synthesis), so the solver applies symbols
//! directly in FFT ordering; the sign matters only when coefficients are used
//! off-grid (band-limited interpolation).
//!
//! Quadrature is the rectangle rule with weight `2L/n`, which is exact in the
//! Parseval sense: `(2L/n)Σ|ψ_j|² = 2L·Σ|c_k|²`. Reductions use compensated
//! (Kahan) summation so that conservation checks probe the solver, not the
//! accumulator.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

use super::SolverError;

/// Compensated summation of a sequence of `f64` terms (Neumaier's variant,
/// which also survives terms larger than the running sum).
///
/// Deterministic for a fixed iteration order, and accurate to O(ε) relative
/// error independent of the number of terms.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for term in terms {
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A uniform periodic grid on `[-L, L)` with a power-of-two node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n: usize,
    half_width: f64,
}

impl SpatialGrid {
    /// `n` must be a power of two with `n ≥ 8`; `half_width` (the `L` in
    /// `[-L, L)`) must be positive and finite.
    pub fn new(n: usize, half_width: f64) -> Result<Self, SolverError> {
        if !n.is_power_of_two() || n < 8 {
            return Err(SolverError::InvalidGridSize(n));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(SolverError::InvalidHalfWidth(half_width));
        }
        Ok(Self { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `L` of the periodic cell `[-L, L)`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Node spacing `2L/n`, also the quadrature weight.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// The `j`-th node `x_j = -L + 2Lj/n`.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j < self.n);
        -self.half_width + 2.0 * self.half_width * j as f64 / self.n as f64
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// The signed mode number for an FFT-ordered index: `0, 1, …, n/2-1,
    /// -n/2, …, -1`.
    pub fn mode_number(&self, k: usize) -> i64 {
        debug_assert!(k < self.n);
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// The frequency `ξ_k = π·m/L` for FFT-ordered index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * self.mode_number(k) as f64 / self.half_width
    }

    /// Discrete `L²(dx)` inner-product quadrature of `|v|²`.
    pub fn l2_norm_sq(&self, values: &[Complex64]) -> f64 {
        self.dx() * kahan_sum(values.iter().map(|v| v.norm_sqr()))
    }
}

/// FFT plans and scratch space for one grid size.
///
/// Forward/inverse transforms follow rustfft's unnormalized convention; the
/// normalized inverse divides by `n` so that `inverse ∘ forward = identity`
/// up to rounding.
pub struct SpectralWorkspace {
    grid: SpatialGrid,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SpectralWorkspace {
    pub fn new(grid: SpatialGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n());
        let inv = planner.plan_fft_inverse(grid.n());
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            grid,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// In-place unnormalized forward DFT.
    pub fn forward(&mut self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.grid.n());
        self.fwd.process_with_scratch(values, &mut self.scratch);
    }

    /// In-place normalized inverse DFT (includes the `1/n` factor).
    pub fn inverse(&mut self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.grid.n());
        self.inv.process_with_scratch(values, &mut self.scratch);
        let scale = 1.0 / self.grid.n() as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
    }

    /// Apply a diagonal Fourier multiplier `ψ ← F⁻¹[ symbol(ξ)·F[ψ] ]`.
    pub fn apply_symbol<F>(&mut self, values: &mut [Complex64], symbol: F)
    where
        F: Fn(f64) -> Complex64,
    {
        self.forward(values);
        for k in 0..self.grid.n() {
            values[k] *= symbol(self.grid.frequency(k));
        }
        self.inverse(values);
    }

    /// The trigonometric coefficients `c_k` (FFT ordering) of the sampled
    /// field, including the `(-1)^k/n` normalization of the module header.
    pub fn coefficients(&mut self, values: &[Complex64]) -> Vec<Complex64> {
        let mut spec = values.to_vec();
        self.forward(&mut spec);
        let n = self.grid.n() as f64;
        for k in 0..self.grid.n() {
            let sign = if self.grid.mode_number(k) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            spec[k] *= sign / n;
        }
        spec
    }
}
