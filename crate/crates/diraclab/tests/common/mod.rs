//! Shared oracles for the integration tests.
//!
//! Everything here is computed from first principles — high-order finite
//! differences, a plain O(n²) discrete Fourier transform, quadratures, and
//! least-squares fits — deliberately independent of the library's own
//! spectral machinery, so agreement between the two is evidence rather than
//! tautology.

#![allow(dead_code)] // each test binary uses its own subset of the oracles

use num_complex::Complex64;

/// Central 8th-order first-derivative stencil (offsets -4..=4), premultiplied
/// weights; divide by h after the dot product.
const D1_WEIGHTS: [f64; 9] = [
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
];

/// Central 8th-order second-derivative stencil (offsets -4..=4); divide by h².
const D2_WEIGHTS: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// 8th-order first derivative of a complex-valued function at `x`.
pub fn d1<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, w) in D1_WEIGHTS.iter().enumerate() {
        if *w != 0.0 {
            acc += *w * f(x + (i as f64 - 4.0) * h);
        }
    }
    acc / h
}

/// 8th-order second derivative of a complex-valued function at `x`.
pub fn d2<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, w) in D2_WEIGHTS.iter().enumerate() {
        acc += *w * f(x + (i as f64 - 4.0) * h);
    }
    acc / (h * h)
}

/// Least-squares slope of y against x.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Trapezoid rule over sample pairs (ts strictly increasing).
pub fn trapezoid(ts: &[f64], vs: &[f64]) -> f64 {
    assert_eq!(ts.len(), vs.len());
    let mut acc = 0.0;
    for j in 1..ts.len() {
        acc += 0.5 * (ts[j] - ts[j - 1]) * (vs[j] + vs[j - 1]);
    }
    acc
}

/// Plain O(n²) DFT matched to nodes `x_j = -L + 2Lj/n` and frequencies
/// `ξ_m = πm/L`, `m ∈ [-n/2, n/2)`: returns the Fourier coefficients `c_m`
/// indexed by `m + n/2`.
pub fn dft_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let table: Vec<Complex64> = (0..n)
        .map(|p| Complex64::cis(2.0 * std::f64::consts::PI * p as f64 / n as f64))
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let m = idx as i64 - (n / 2) as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            // e^{-i ξ_m x_j} = (-1)^m ω^{-mj} with ω = e^{2πi/n}
            let p = (((-(m) * j as i64) % n as i64) + n as i64) as usize % n;
            acc += *v * table[p];
        }
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        *c = sign * acc / n as f64;
    }
    coeffs
}

/// Inverse of [`dft_coefficients`]: synthesize node values from coefficients.
pub fn dft_synthesize(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let table: Vec<Complex64> = (0..n)
        .map(|p| Complex64::cis(2.0 * std::f64::consts::PI * p as f64 / n as f64))
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (j, v) in values.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in coeffs.iter().enumerate() {
            let m = idx as i64 - (n / 2) as i64;
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let p = ((m * j as i64).rem_euclid(n as i64)) as usize;
            acc += sign * *c * table[p];
        }
        *v = acc;
    }
    values
}

/// Transport periodic node values by the free Schrödinger flow
/// `σi∂_tψ + ∂_xxψ = 0` over time `dt`, entirely through the plain DFT.
pub fn transport_free(
    values: &[Complex64],
    half_width: f64,
    sigma: f64,
    dt: f64,
) -> Vec<Complex64> {
    let n = values.len();
    let mut coeffs = dft_coefficients(values);
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let m = idx as i64 - (n / 2) as i64;
        let xi = std::f64::consts::PI * m as f64 / half_width;
        *c *= Complex64::from_polar(1.0, -sigma * dt * xi * xi);
    }
    dft_synthesize(&coeffs)
}

/// Discrete L² distance between two node-value arrays on a grid with spacing
/// `dx`.
pub fn l2_distance(dx: f64, a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (dx * sum).sqrt()
}

/// Discrete squared L² norm of node values with spacing `dx`.
pub fn l2_norm_sq(dx: f64, a: &[Complex64]) -> f64 {
    dx * a.iter().map(|x| x.norm_sqr()).sum::<f64>()
}
