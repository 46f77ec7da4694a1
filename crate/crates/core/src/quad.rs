//! Quadrature and sampling helpers shared by the analytic modules.
//!
//! Circle integrands here are smooth except at isolated logarithmic
//! singularities, so the workhorse is the periodic trapezoid rule with node
//! doubling (spectrally accurate for analytic integrands).

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge to tolerance {tol} (last change {change}, {nodes} nodes)")]
    NoConvergence { tol: f64, change: f64, nodes: usize },
}

/// Result of an adaptive quadrature: value plus a heuristic error estimate
/// (the change produced by the last node doubling).
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

pub const MIN_CIRCLE_NODES: usize = 64;
pub const MAX_CIRCLE_NODES: usize = 1 << 20;

/// Mean of `f(theta)` over `[0, 2pi)` by the periodic trapezoid rule with
/// node doubling until the change falls below `tol`.
pub fn circle_mean<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> Result<Estimate, QuadError> {
    let mut n = MIN_CIRCLE_NODES;
    let mut sum = 0.0;
    for k in 0..n {
        sum += f(2.0 * PI * k as f64 / n as f64);
    }
    let mut mean = sum / n as f64;
    loop {
        // Doubling reuses the previous nodes: only the odd ones are new.
        let mut odd = 0.0;
        for k in 0..n {
            odd += f(2.0 * PI * (2 * k + 1) as f64 / (2 * n) as f64);
        }
        let next = 0.5 * (mean + odd / n as f64);
        let change = (next - mean).abs();
        n *= 2;
        mean = next;
        if change < tol {
            return Ok(Estimate { value: mean, error: change });
        }
        if n >= MAX_CIRCLE_NODES {
            return Err(QuadError::NoConvergence { tol, change, nodes: n });
        }
    }
}

/// Fixed-node circle samples `f(2pi k / n)`, for integrals that are reused
/// against many different weights (base-point sweeps).
pub fn circle_samples<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> Vec<f64> {
    (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect()
}

/// Mean of precomputed circle samples against a weight function of theta.
pub fn weighted_mean(samples: &[f64], mut weight: impl FnMut(f64) -> f64) -> f64 {
    let n = samples.len();
    let mut sum = 0.0;
    for (k, v) in samples.iter().enumerate() {
        sum += v * weight(2.0 * PI * k as f64 / n as f64);
    }
    sum / n as f64
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial (standard Golub–Welsch-free construction).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Deterministic low-discrepancy points in the unit disk (golden-angle
/// spiral), scaled to radius `r`. Used for exterior sampling oracles.
pub fn disk_low_discrepancy(r: f64, count: usize) -> Vec<num_complex::Complex64> {
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|k| {
            let rho = r * ((k as f64 + 0.5) / count as f64).sqrt();
            let theta = golden * k as f64;
            num_complex::Complex64::from_polar(rho, theta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trapezoid_integrates_smooth_periodic() {
        // mean of exp(cos t) over the circle is I_0(1)
        let est = circle_mean(|t| t.cos().exp(), 1e-12).unwrap();
        assert_abs_diff_eq!(est.value, 1.2660658777520084, epsilon = 1e-12);
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(8);
        // integral of x^6 over [-1,1] = 2/7
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert_abs_diff_eq!(s, 2.0 / 7.0, epsilon = 1e-13);
    }

    #[test]
    fn spiral_points_stay_in_disk() {
        for p in disk_low_discrepancy(2.5, 1000) {
            assert!(p.norm() <= 2.5);
        }
    }
}
