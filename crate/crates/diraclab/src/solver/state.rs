//! Field states: complex samples of the unknown on a grid at one time.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{SpatialGrid, SpectralWorkspace};
use super::SolverError;

/// Complex samples of the perturbation on a [`SpatialGrid`] at one time.
///
/// States are immutable values: solver operations consume a reference and
/// return a fresh state. The `time` label is carried along by the integrator
/// and set from the mesh nodes (never accumulated by repeated addition).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    grid: SpatialGrid,
    values: Vec<Complex64>,
    time: f64,
}

impl FieldState {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>, time: f64) -> Result<Self, SolverError> {
        if values.len() != grid.n() {
            return Err(SolverError::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if !time.is_finite() {
            return Err(SolverError::NonFinite(format!("state time {time}")));
        }
        Ok(Self { grid, values, time })
    }

    /// The zero field.
    pub fn zeros(grid: SpatialGrid, time: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
            time,
        }
    }

    /// Sample a function of space on the grid nodes.
    pub fn from_fn<F>(grid: SpatialGrid, time: f64, f: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        let values = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Self { grid, values, time }
    }

    /// Real Gaussian bump `amp·exp(-x²/(2·width²))`.
    ///
    /// The width should be well inside the half-width so the periodic wrap is
    /// negligible; the boundary-contamination diagnostic reports the actual
    /// edge magnitude of whatever evolves from it.
    pub fn gaussian(grid: SpatialGrid, time: f64, amp: f64, width: f64) -> Result<Self, SolverError> {
        if !(width > 0.0) || !width.is_finite() || !amp.is_finite() {
            return Err(SolverError::NonFinite(format!(
                "gaussian profile parameters amp={amp}, width={width}"
            )));
        }
        Ok(Self::from_fn(grid, time, |x| {
            Complex64::new(amp * (-x * x / (2.0 * width * width)).exp(), 0.0)
        }))
    }

    /// The single Fourier mode `amp·e^{iξ_m x}` for a signed mode number `m`.
    pub fn single_mode(
        grid: SpatialGrid,
        time: f64,
        amp: f64,
        mode: i64,
    ) -> Result<Self, SolverError> {
        let half = grid.n() as i64 / 2;
        if mode < -half || mode >= half {
            return Err(SolverError::InvalidEquation(format!(
                "mode number {mode} outside the resolved band [{}, {})",
                -half, half
            )));
        }
        if !amp.is_finite() {
            return Err(SolverError::NonFinite(format!("mode amplitude {amp}")));
        }
        let xi = std::f64::consts::PI * mode as f64 / grid.half_width();
        Ok(Self::from_fn(grid, time, |x| {
            amp * Complex64::cis(xi * x)
        }))
    }

    /// A reproducible random smooth profile: a band of low Fourier modes with
    /// seeded uniform coefficients under a Gaussian spectral envelope, then
    /// rescaled so the maximum modulus equals `amp`.
    ///
    /// Identical `(grid, seed)` pairs produce bit-identical profiles.
    pub fn random_smooth(
        grid: SpatialGrid,
        time: f64,
        amp: f64,
        seed: u64,
    ) -> Result<Self, SolverError> {
        if !amp.is_finite() {
            return Err(SolverError::NonFinite(format!("profile amplitude {amp}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band: i64 = 8;
        let coeffs: Vec<(f64, Complex64)> = (-band..=band)
            .map(|m| {
                let envelope = (-((m as f64 / 3.0).powi(2))).exp();
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                let xi = std::f64::consts::PI * m as f64 / grid.half_width();
                (xi, envelope * Complex64::new(re, im))
            })
            .collect();
        let mut state = Self::from_fn(grid, time, |x| {
            coeffs
                .iter()
                .map(|&(xi, c)| c * Complex64::cis(xi * x))
                .sum()
        });
        let max = state
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        if max > 0.0 {
            let scale = amp / max;
            for v in &mut state.values {
                *v *= scale;
            }
        }
        Ok(state)
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// Relabel the state's time without touching the samples (public variant
    /// used when bridging frames, e.g. handing a conformal-frame profile to
    /// an operator that tracks a different clock).
    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    /// Discrete squared `L²` norm, `(2L/n)·Σ|ψ_j|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.l2_norm_sq(&self.values)
    }

    /// Discrete `L²` distance to another state on the same grid.
    pub fn l2_distance(&self, other: &FieldState) -> Result<f64, SolverError> {
        if self.grid != other.grid {
            return Err(SolverError::GridMismatch);
        }
        let dx = self.grid.dx();
        let sum = super::grid::kahan_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm_sqr()),
        );
        Ok((dx * sum).sqrt())
    }

    /// Whether every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Band-limited (trigonometric) evaluation at an arbitrary point of the
    /// periodic cell: `ψ(y) = Σ_k c_k e^{iξ_k y}`.
    ///
    /// Builds the spectrum on each call; for repeated evaluation construct a
    /// [`BandLimitedSampler`] once instead.
    pub fn interpolate(&self, y: f64) -> Complex64 {
        self.sampler().eval(y)
    }

    /// Precompute the trigonometric coefficients for repeated off-grid
    /// evaluation.
    pub fn sampler(&self) -> BandLimitedSampler {
        let mut ws = SpectralWorkspace::new(self.grid);
        let coeffs = ws.coefficients(&self.values);
        BandLimitedSampler {
            grid: self.grid,
            coeffs,
        }
    }
}

/// Trigonometric-sum evaluator for one field state.
pub struct BandLimitedSampler {
    grid: SpatialGrid,
    coeffs: Vec<Complex64>,
}

impl BandLimitedSampler {
    /// Evaluate `Σ_k c_k e^{iξ_k y}`.
    pub fn eval(&self, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.grid.n() {
            acc += self.coeffs[k] * Complex64::cis(self.grid.frequency(k) * y);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_grid_samples() {
        let grid = SpatialGrid::new(32, 2.0).unwrap();
        let state = FieldState::from_fn(grid, 0.0, |x| {
            Complex64::new((1.3 * x).sin(), (0.7 * x).cos())
        });
        let sampler = state.sampler();
        for j in [0, 5, 16, 31] {
            let x = grid.node(j);
            let v = sampler.eval(x);
            assert!(
                (v - state.values()[j]).norm() < 1e-12,
                "node {j}: {v} vs {}",
                state.values()[j]
            );
        }
    }

    #[test]
    fn interpolation_is_exact_on_band_limited_fields() {
        // A field made of a few modes is reproduced exactly off-grid.
        let grid = SpatialGrid::new(64, 3.0).unwrap();
        let xi1 = grid.frequency(2);
        let xi2 = grid.frequency(64 - 5); // mode -5
        let f = move |x: f64| {
            Complex64::cis(xi1 * x) * 0.8 + Complex64::cis(xi2 * x) * Complex64::new(0.1, 0.4)
        };
        let state = FieldState::from_fn(grid, 0.0, f);
        let sampler = state.sampler();
        for &y in &[-2.9, -1.234, 0.001, 2.71] {
            assert!((sampler.eval(y) - f(y)).norm() < 1e-12);
        }
    }

    #[test]
    fn random_profiles_are_reproducible() {
        let grid = SpatialGrid::new(64, 5.0).unwrap();
        let a = FieldState::random_smooth(grid, 0.0, 0.05, 42).unwrap();
        let b = FieldState::random_smooth(grid, 0.0, 0.05, 42).unwrap();
        assert_eq!(a.values(), b.values());
        let c = FieldState::random_smooth(grid, 0.0, 0.05, 43).unwrap();
        assert_ne!(a.values(), c.values());
        let max = a.values().iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        assert!((max - 0.05).abs() < 1e-15);
    }

    #[test]
    fn single_mode_band_check() {
        let grid = SpatialGrid::new(16, 1.0).unwrap();
        assert!(FieldState::single_mode(grid, 0.0, 1.0, 8).is_err());
        assert!(FieldState::single_mode(grid, 0.0, 1.0, -9).is_err());
        assert!(FieldState::single_mode(grid, 0.0, 1.0, -8).is_ok());
        assert!(FieldState::single_mode(grid, 0.0, 1.0, 7).is_ok());
    }
}
