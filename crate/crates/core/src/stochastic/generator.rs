use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brownian::sample_brownian_until;
use super::montecarlo::{map_paths, sample_psi, McConfig, McEstimate};
use crate::deterministic::fixed_point::find_disk_zero;
use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;

/// Half-width of the central time difference in [`backward_equation_residual`].
pub const BACKWARD_TIME_STEP: f64 = 1e-2;
const CONTOUR_POINTS: usize = 8;

/// Drift `−k²/2·z + (z − 1)²p̃(z)` of the rotated diffusion.
pub fn drift(spec: &HerglotzSpec, k: f64, z: Complex64) -> Complex64 {
    spec.loewner_field(z) - z * (0.5 * k * k)
}

fn check_open_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(LoewnerError::Domain(format!("z must lie in the open disk, got |z| = {}", z.norm())))
    }
}

/// `A f(z) = (−k²/2·z + (z − 1)²p̃(z)) f′(z) − k²/2·z² f″(z)`.
pub fn apply_generator<D1, D2>(spec: &HerglotzSpec, k: f64, z: Complex64, df: D1, d2f: D2) -> Result<Complex64>
where
    D1: Fn(Complex64) -> Complex64,
    D2: Fn(Complex64) -> Complex64,
{
    check_open_disk(z)?;
    Ok(drift(spec, k, z) * df(z) - z * z * (0.5 * k * k) * d2f(z))
}

/// Radius of the derivative contour around `z`.
fn contour_radius(z: Complex64) -> f64 {
    1e-2f64.min(0.5 * (1.0 - z.norm()))
}

/// First and second derivatives of an analytic `f` at `z` from the Cauchy
/// integral on `n` points of a circle of radius `r`.
pub fn cauchy_derivatives<F: Fn(Complex64) -> Complex64>(
    f: F,
    z: Complex64,
    r: f64,
    n: usize,
) -> (Complex64, Complex64) {
    let mut d1 = Complex64::new(0.0, 0.0);
    let mut d2 = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let w = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
        let v = f(z + w * r);
        d1 += v / w;
        d2 += v / (w * w);
    }
    (d1 / (n as f64 * r), d2 * 2.0 / (n as f64 * r * r))
}

/// [`apply_generator`] with derivatives taken from `f` by a 16-point Cauchy contour.
pub fn apply_generator_numeric<F: Fn(Complex64) -> Complex64>(
    spec: &HerglotzSpec,
    k: f64,
    z: Complex64,
    f: F,
) -> Result<Complex64> {
    check_open_disk(z)?;
    let (d1, d2) = cauchy_derivatives(f, z, contour_radius(z), 16);
    Ok(drift(spec, k, z) * d1 - z * z * (0.5 * k * k) * d2)
}

/// Coefficients of `A = Σ cₙ𝓛ₙ − (k²/2)𝓛₀²`, `𝓛ₙ = −z^{n+1}∂_z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirasoroForm {
    /// `c₋₁, c₀, …, c_N`.
    pub coefficients: Vec<Complex64>,
    pub l0_squared: f64,
}

impl VirasoroForm {
    /// `cₙ` for `n ≥ −1`; zero beyond the stored range.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        usize::try_from(n + 1).ok().and_then(|j| self.coefficients.get(j).copied()).unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// `cₙ = −(a_{n+1} − 2aₙ + a_{n−1})` for `n = −1..N`, with `a₋₁ = a₋₂ = 0`.
pub fn virasoro_coefficients(spec: &HerglotzSpec, k: f64, n: usize) -> VirasoroForm {
    let a = spec.taylor_coefficients(n + 1);
    let at = |j: i64| if j < 0 { Complex64::new(0.0, 0.0) } else { a[j as usize] };
    let coefficients = (-1..=n as i64).map(|m| -(at(m + 1) - at(m) * 2.0 + at(m - 1))).collect();
    VirasoroForm { coefficients, l0_squared: 0.5 * k * k }
}

/// The unique zero of the drift `−k²/2·z + (z − 1)²p̃(z)` in the disk.
pub fn find_stochastic_zero(spec: &HerglotzSpec, k: f64) -> Result<Complex64> {
    if k == 0.0 || !k.is_finite() {
        return Err(LoewnerError::InvalidArgument(format!("k must be finite and nonzero, got {k}")));
    }
    find_disk_zero(spec, Complex64::new(0.5 * k * k, 0.0))
        .ok_or_else(|| LoewnerError::NotFound(format!("no interior zero of the drift for {spec}, k = {k}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackwardResidual {
    /// `|∂_t u − A u|` at `(t, z)`.
    pub residual: f64,
    pub std_error: f64,
    /// Mean of the per-path values of `∂_t u − A u`.
    pub estimate: McEstimate,
}

/// Checks `∂_t u = A u` for `u(t, z) = E f(Ψ_t(z))`.
///
/// Along each path, `∂_t u` is a central difference over `t ± h` and `A u`
/// applies the generator to `w ↦ f(Ψ_t(w))` with derivatives from an
/// 8-point Cauchy contour; the same path serves all of these, so the
/// per-path values can be averaged directly.
pub fn backward_equation_residual<F>(
    spec: &HerglotzSpec,
    k: f64,
    f: F,
    t: f64,
    z: Complex64,
    cfg: &McConfig,
) -> Result<BackwardResidual>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    cfg.validate()?;
    check_open_disk(z)?;
    let h = BACKWARD_TIME_STEP;
    if !(t > h) {
        return Err(LoewnerError::InvalidArgument(format!("t must exceed the time step {h}, got {t}")));
    }
    let r = contour_radius(z);
    let nodes: Vec<Complex64> =
        (0..CONTOUR_POINTS).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / CONTOUR_POINTS as f64)).collect();
    let contour: Vec<Complex64> = nodes.iter().map(|w| z + w * r).collect();
    let b = drift(spec, k, z);
    let diffusion = z * z * (0.5 * k * k);
    let samples = map_paths(cfg.n_samples, cfg.root_seed, |_, seed| {
        let path = sample_brownian_until(seed, cfg.dt, t + h)?;
        let center = &sample_psi(spec, k, &[z], &path, &[0.0, t - h, t + h], cfg.sampler)?[0];
        let ring = sample_psi(spec, k, &contour, &path, &[0.0, t], cfg.sampler)?;
        let dt_u = (f(center[2]) - f(center[1])) / (2.0 * h);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for (w, psi) in nodes.iter().zip(&ring) {
            let v = f(psi[1]);
            d1 += v / w;
            d2 += v / (w * w);
        }
        let n = CONTOUR_POINTS as f64;
        let (d1, d2) = (d1 / (n * r), d2 * 2.0 / (n * r * r));
        Ok(dt_u - (b * d1 - diffusion * d2))
    })?;
    let estimate = McEstimate::from_samples(&samples)?;
    Ok(BackwardResidual { residual: estimate.mean.norm(), std_error: estimate.std_error, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::montecarlo::expectation_tt;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constants_are_annihilated() {
        let zero = |_| c(0.0, 0.0);
        let v = apply_generator(&HerglotzSpec::Cayley, 1.3, c(0.2, 0.1), zero, zero).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        let v = apply_generator_numeric(&HerglotzSpec::Cayley, 1.3, c(0.2, 0.1), |_| c(2.0, -1.0)).unwrap();
        assert!(v.norm() < 1e-12);
        assert!(apply_generator(&HerglotzSpec::Cayley, 1.0, c(1.0, 0.0), zero, zero).is_err());
    }

    #[test]
    fn numeric_derivatives_match_explicit() {
        for spec in [HerglotzSpec::Cayley, HerglotzSpec::Exponential] {
            for z in [c(0.0, 0.0), c(0.5, -0.3), c(-0.9, 0.1)] {
                let explicit = apply_generator(&spec, 1.5, z, |w| w.powi(2) * 3.0, |w| w * 6.0).unwrap();
                let numeric = apply_generator_numeric(&spec, 1.5, z, |w| w.powi(3)).unwrap();
                assert!((explicit - numeric).norm() < 1e-9, "{spec} {z}");
            }
        }
    }

    #[test]
    fn stochastic_zero_examples() {
        for k in [0.5, 1.0, 2.0, -3.0] {
            let z0 = find_stochastic_zero(&HerglotzSpec::CayleyLinear, k).unwrap();
            assert!((z0 - c(2.0 / (2.0 + k * k), 0.0)).norm() < 1e-12);
            let v = apply_generator(&HerglotzSpec::CayleyLinear, k, z0, |_| c(1.0, 0.0), |_| c(0.0, 0.0)).unwrap();
            assert!(v.norm() <= 1e-9);
        }
        assert!((find_stochastic_zero(&HerglotzSpec::CayleyLinear, 2.0).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        for spec in [HerglotzSpec::Cayley, HerglotzSpec::ConstantImaginary, HerglotzSpec::Exponential] {
            let z0 = find_stochastic_zero(&spec, 1.0).unwrap();
            assert!(drift(&spec, 1.0, z0).norm() <= 1e-11);
        }
        assert!(find_stochastic_zero(&HerglotzSpec::Cayley, 0.0).is_err());
    }

    #[test]
    fn virasoro_examples() {
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let zero = c(0.0, 0.0);
        let v = virasoro_coefficients(&HerglotzSpec::CayleyLinear, 2.0, 4);
        assert_eq!(v.coefficients, vec![-one, one, zero, zero, zero, zero]);
        assert_eq!(v.l0_squared, 2.0);
        let v = virasoro_coefficients(&HerglotzSpec::Cayley, 1.0, 3);
        assert_eq!(v.coefficients, vec![-one, zero, one, zero, zero]);
        let v = virasoro_coefficients(&HerglotzSpec::ConstantImaginary, 1.0, 3);
        assert_eq!(v.coefficients, vec![-i, i * 2.0, -i, zero, zero]);
        let (a, b) = (0.7, -1.25);
        let v = virasoro_coefficients(&HerglotzSpec::automorphism(a, b).unwrap(), 1.0, 3);
        assert_eq!(v.coefficients, vec![-c(a, b), c(0.0, 2.0 * b), c(a, -b), zero, zero]);
        assert_eq!(v.coefficient(-1), -c(a, b));
        assert_eq!(v.coefficient(10), zero);
    }

    #[test]
    fn virasoro_form_reproduces_generator() {
        let spec = HerglotzSpec::Exponential;
        let k = 1.2;
        let v = virasoro_coefficients(&spec, k, 40);
        let z = c(0.3, 0.2);
        // A f = −Σ cₙ z^{n+1} f′ − (k²/2)(z f′ + z² f″), f = w³
        let (d1, d2) = (z * z * 3.0, z * 6.0);
        let series: Complex64 = (-1..=40).map(|n| v.coefficient(n) * z.powi(n as i32 + 1)).sum();
        let from_form = -series * d1 - (z * d1 + z * z * d2) * v.l0_squared;
        let direct = apply_generator(&spec, k, z, |_| d1, |_| d2).unwrap();
        assert!((from_form - direct).norm() < 1e-12);
    }

    #[test]
    fn dynkin_limit_for_square() {
        let spec = HerglotzSpec::Cayley;
        let k = 1.0;
        let z = c(0.3, 0.2);
        let af = apply_generator(&spec, k, z, |w| w * 2.0, |_| c(2.0, 0.0)).unwrap();
        // second-order term t/2·A²f bounds the bias of the difference quotient
        let a2f = apply_generator_numeric(&spec, k, z, |w| {
            apply_generator(&spec, k, w, |u| u * 2.0, |_| c(2.0, 0.0)).unwrap()
        })
        .unwrap();
        for (t, dt) in [(1e-1, 1e-3), (1e-2, 1e-4), (1e-3, 1e-5)] {
            let cfg = McConfig { dt, ..McConfig::new(10_000, 12) };
            let fz = z * z;
            let e = expectation_tt(&spec, k, t, z, |w| (w * w - fz) / t, &cfg).unwrap();
            let gap = (e.mean - af).norm();
            assert!(gap <= 3.0 * e.std_error + t * a2f.norm(), "t={t} gap={gap} se={}", e.std_error);
        }
    }

    #[test]
    fn dynkin_at_stochastic_zero() {
        let spec = HerglotzSpec::Cayley;
        let k = 1.0;
        let z0 = find_stochastic_zero(&spec, k).unwrap();
        let t = 1e-2;
        let cfg = McConfig { dt: 1e-4, ..McConfig::new(10_000, 13) };
        let e = expectation_tt(&spec, k, t, z0, |w| (w - z0) / t, &cfg).unwrap();
        assert!(e.mean.norm() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn backward_equation_identity() {
        let cfg = McConfig { dt: 5e-3, ..McConfig::new(20_000, 14) };
        let r = backward_equation_residual(&HerglotzSpec::CayleyLinear, 1.0, |w| w, 0.5, c(0.2, 0.1), &cfg).unwrap();
        assert!(r.residual <= 3.0 * r.std_error, "{r:?}");
        assert!(backward_equation_residual(&HerglotzSpec::CayleyLinear, 1.0, |w| w, 0.0, c(0.2, 0.1), &cfg).is_err());
    }
}
