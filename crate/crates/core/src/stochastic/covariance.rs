use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brownian::{sample_brownian_until, BrownianPath};
use super::montecarlo::{map_paths, McConfig, McEstimate};
use crate::error::{LoewnerError, Result};

/// Closed-form moments of `X = e^{−t}∫₀ᵗ e^s e^{ikB_s} ds` and `Y = e^{−ikB_t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReference {
    /// `E Y`
    pub e1: f64,
    /// `E X`
    pub e2: f64,
    /// `E[X·Y]`
    pub e3: Complex64,
    /// `E[X·Y] − E X·E Y`
    pub cov: Complex64,
}

pub fn covariance_reference(t: f64, k: f64) -> CovarianceReference {
    let half_k2 = 0.5 * k * k;
    let e1 = (-half_k2 * t).exp();
    let e2 = if (k * k - 2.0).abs() <= 1e-12 { t * (-t).exp() } else { (e1 - (-t).exp()) / (1.0 - half_k2) };
    let e3 = -(-(1.0 + half_k2) * t).exp_m1() / (1.0 + half_k2);
    CovarianceReference { e1, e2, e3: Complex64::new(e3, 0.0), cov: Complex64::new(e3 - e2 * e1, 0.0) }
}

/// `(X, Y)` along one path, the integral by the trapezoid rule.
pub fn covariance_pair(path: &BrownianPath, k: f64) -> (Complex64, Complex64) {
    let t = path.duration();
    let g = |j: usize| Complex64::from_polar(path.time(j).exp(), k * path.values[j]);
    let n = path.n_steps();
    let mut integral = (g(0) + g(n)) * 0.5;
    for j in 1..n {
        integral += g(j);
    }
    let x = integral * path.dt * (-t).exp();
    let y = Complex64::from_polar(1.0, -k * path.values[n]);
    (x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub e1: McEstimate,
    pub e2: McEstimate,
    pub e3: McEstimate,
    pub cov: McEstimate,
}

impl CovarianceEstimate {
    /// Whether every component is within `n_se` standard errors of `reference`.
    pub fn agrees_with(&self, reference: &CovarianceReference, n_se: f64) -> [bool; 4] {
        [
            self.e1.agrees_with(Complex64::new(reference.e1, 0.0), n_se),
            self.e2.agrees_with(Complex64::new(reference.e2, 0.0), n_se),
            self.e3.agrees_with(reference.e3, n_se),
            self.cov.agrees_with(reference.cov, n_se),
        ]
    }
}

/// Monte Carlo estimates of the four covariance components. The standard
/// error of the covariance uses the influence values `XY − X·Ȳ − Y·X̄`.
pub fn covariance_monte_carlo(t: f64, k: f64, cfg: &McConfig) -> Result<CovarianceEstimate> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t must be > 0, got {t}")));
    }
    let pairs = map_paths(cfg.n_samples, cfg.root_seed, |_, seed| {
        Ok(covariance_pair(&sample_brownian_until(seed, cfg.dt, t)?, k))
    })?;
    let xs: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = pairs.iter().map(|p| p.1).collect();
    let xys: Vec<Complex64> = pairs.iter().map(|(x, y)| x * y).collect();
    let e1 = McEstimate::from_samples(&ys)?;
    let e2 = McEstimate::from_samples(&xs)?;
    let e3 = McEstimate::from_samples(&xys)?;
    let influence: Vec<Complex64> = pairs.iter().map(|(x, y)| x * y - x * e1.mean - y * e2.mean).collect();
    let spread = McEstimate::from_samples(&influence)?;
    let cov = McEstimate { mean: e3.mean - e2.mean * e1.mean, ..spread };
    Ok(CovarianceEstimate { e1, e2, e3, cov })
}

/// `E e^{−ikB_t}` from exact Gaussian endpoints.
pub fn characteristic_monte_carlo(t: f64, k: f64, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let samples = map_paths(cfg.n_samples, cfg.root_seed, |_, seed| {
        let path = super::brownian::sample_brownian(seed, t, 1)?;
        Ok(Complex64::from_polar(1.0, -k * path.values[1]))
    })?;
    McEstimate::from_samples(&samples)
}

/// Itô product-rule defect for `Z = e^{−ikB}` and `W = ∫₀ e^s e^{ikB_s} ds`:
/// `Z_T W_T − Σ [W_j Z_j(−ikΔB_j − k²Δt/2) + Z_j e^{t_j} e^{ikB_j} Δt]`,
/// with `W` accumulated by the trapezoid rule and `dZ·dW = 0`.
pub fn ito_product_defect(path: &BrownianPath, k: f64) -> Complex64 {
    let dt = path.dt;
    let i = Complex64::new(0.0, 1.0);
    let z = |j: usize| Complex64::from_polar(1.0, -k * path.values[j]);
    let g = |j: usize| Complex64::from_polar(path.time(j).exp(), k * path.values[j]);
    let mut w = Complex64::new(0.0, 0.0);
    let mut predicted = Complex64::new(0.0, 0.0);
    for j in 0..path.n_steps() {
        let db = path.values[j + 1] - path.values[j];
        predicted += w * z(j) * (-i * k * db - 0.5 * k * k * dt) + z(j) * g(j) * dt;
        w += (g(j) + g(j + 1)) * (0.5 * dt);
    }
    z(path.n_steps()) * w - predicted
}

/// Root-mean-square of [`ito_product_defect`] over paths.
pub fn ito_defect_rms(paths: &[BrownianPath], k: f64) -> f64 {
    let sq: f64 = paths.iter().map(|p| ito_product_defect(p, k).norm_sqr()).sum();
    (sq / paths.len() as f64).sqrt()
}
