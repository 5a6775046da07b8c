use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brownian::BrownianPath;
use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;
use crate::quadrature;

fn check_automorphism(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0) || !b.is_finite() || !a.is_finite() || (a == 0.0 && b == 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("need A >= 0 and (A, B) != (0, 0), got A = {a}, B = {b}")));
    }
    Ok(())
}

/// `|φ_t|` and `arg φ_t` on the path grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarTrajectory {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    /// Continuous (unwrapped) argument.
    pub theta: Vec<f64>,
}

/// RK4 for the polar form of the automorphism flow,
/// `r' = (1 − r²)|p̃(0)|cos(θ − kB − arg p̃(0))`,
/// `θ' = −2 Im p̃(0) − (1/r + r)|p̃(0)| sin(θ − kB − arg p̃(0))`.
pub fn evolve_polar(a: f64, b: f64, k: f64, r0: f64, theta0: f64, path: &BrownianPath) -> Result<PolarTrajectory> {
    check_automorphism(a, b)?;
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(LoewnerError::Domain(format!("polar form needs 0 < r0 <= 1, got {r0}")));
    }
    let modulus = a.hypot(b);
    let phase = b.atan2(a);
    let rhs = |t: f64, r: f64, th: f64| {
        let x = th - k * path.b_at(t) - phase;
        ((1.0 - r * r) * modulus * x.cos(), -2.0 * b - (1.0 / r + r) * modulus * x.sin())
    };
    let n = path.n_steps();
    let mut r_out = Vec::with_capacity(n + 1);
    let mut th_out = Vec::with_capacity(n + 1);
    let (mut r, mut th) = (r0, theta0);
    r_out.push(r);
    th_out.push(th);
    let h = path.dt;
    for j in 0..n {
        let t = path.time(j);
        let k1 = rhs(t, r, th);
        let k2 = rhs(t + 0.5 * h, r + 0.5 * h * k1.0, th + 0.5 * h * k1.1);
        let k3 = rhs(t + 0.5 * h, r + 0.5 * h * k2.0, th + 0.5 * h * k2.1);
        let k4 = rhs(t + h, r + h * k3.0, th + h * k3.1);
        r += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        th += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if r0 == 1.0 {
            r = 1.0;
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(LoewnerError::Domain(format!("polar radius collapsed at t = {}", path.time(j + 1))));
        }
        r_out.push(r);
        th_out.push(th);
    }
    Ok(PolarTrajectory { times: path.times(), r: r_out, theta: th_out })
}

/// `r(t) = tanh(|p̃(0)|∫₀ᵗ cos(θ_s − kB_s − arg p̃(0)) ds + artanh r₀)`, the
/// integral by the trapezoid rule on the path grid; `r ≡ 1` when `r₀ = 1`.
pub fn radial_solution(a: f64, b: f64, k: f64, r0: f64, path: &BrownianPath, theta: &[f64]) -> Result<Vec<f64>> {
    check_automorphism(a, b)?;
    if !(0.0..=1.0).contains(&r0) {
        return Err(LoewnerError::Domain(format!("r0 must lie in [0, 1], got {r0}")));
    }
    if theta.len() != path.values.len() {
        return Err(LoewnerError::InvalidArgument(format!(
            "theta has {} samples, the path has {}",
            theta.len(),
            path.values.len()
        )));
    }
    if r0 == 1.0 {
        return Ok(vec![1.0; theta.len()]);
    }
    let modulus = a.hypot(b);
    let phase = b.atan2(a);
    let g = |j: usize| (theta[j] - k * path.values[j] - phase).cos();
    let base = r0.atanh();
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(theta.len());
    out.push(r0);
    for j in 1..theta.len() {
        integral += 0.5 * path.dt * (g(j - 1) + g(j));
        out.push((modulus * integral + base).tanh());
    }
    Ok(out)
}

/// Herglotz functions with explicit growth estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthSpec {
    Cayley,
    CayleyLinear,
    /// `p̃ ≡ 1`.
    One,
}

impl GrowthSpec {
    pub const ALL: [GrowthSpec; 3] = [GrowthSpec::Cayley, GrowthSpec::CayleyLinear, GrowthSpec::One];

    pub fn herglotz(self) -> HerglotzSpec {
        match self {
            GrowthSpec::Cayley => HerglotzSpec::Cayley,
            GrowthSpec::CayleyLinear => HerglotzSpec::CayleyLinear,
            GrowthSpec::One => HerglotzSpec::taylor(vec![Complex64::new(1.0, 0.0)]).expect("p = 1 is admissible"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GrowthSpec::Cayley => "cayley",
            GrowthSpec::CayleyLinear => "cayley-linear",
            GrowthSpec::One => "one",
        }
    }
}

impl FromStr for GrowthSpec {
    type Err = LoewnerError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|g| g.as_str() == s).ok_or_else(|| {
            LoewnerError::Parse(format!("unknown growth spec '{s}' (expected cayley|cayley-linear|one)"))
        })
    }
}

/// Lower and upper bounds on `|φ_t(z)|` for `|z| = r₀`, any driving path.
/// The lower bound is clamped at 0.
pub fn growth_bounds(spec: GrowthSpec, r0: f64, t: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&r0) {
        return Err(LoewnerError::Domain(format!("r0 must lie in [0, 1], got {r0}")));
    }
    if !(t >= 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok((r0, r0));
    }
    let (lower, upper) = match spec {
        GrowthSpec::Cayley => {
            if r0 == 1.0 {
                (1.0, 1.0)
            } else {
                let base = r0.atanh();
                ((base - t).tanh(), (base + t).tanh())
            }
        }
        GrowthSpec::CayleyLinear => {
            let e = (-t).exp();
            (r0 * e - (1.0 - e), r0 * e + (1.0 - e))
        }
        GrowthSpec::One => {
            ((r0 * (1.0 - t) - t) / (1.0 + t * (1.0 + r0)), (r0 * (1.0 - t) + t) / (1.0 + t * (1.0 - r0)))
        }
    };
    Ok((lower.max(0.0), upper))
}

/// Drift `−2(Im p̃(0) + |p̃(0)| sin θ)` of the boundary diffusion.
pub fn boundary_drift(a: f64, b: f64, theta: f64) -> f64 {
    -2.0 * (b + a.hypot(b) * theta.sin())
}

/// Euler–Maruyama for `dΘ = −2(Im p̃(0) + |p̃(0)| sin Θ) dt − k dB`, reported mod 2π.
pub fn simulate_boundary_diffusion(a: f64, b: f64, k: f64, theta0: f64, path: &BrownianPath) -> Result<Vec<f64>> {
    check_automorphism(a, b)?;
    let mut theta = theta0;
    let mut out = Vec::with_capacity(path.values.len());
    out.push(theta.rem_euclid(TAU));
    for w in path.values.windows(2) {
        theta += boundary_drift(a, b, theta) * path.dt - k * (w[1] - w[0]);
        out.push(theta.rem_euclid(TAU));
    }
    Ok(out)
}

/// `c₁ + c₂∫₀^θ exp(4(s·Im p̃(0) − |p̃(0)|cos s)/k²) ds`, a solution of `A f = 0`
/// for the boundary generator.
pub fn generator_annihilator(a: f64, b: f64, k: f64, theta: f64, c1: Complex64, c2: Complex64) -> Result<Complex64> {
    check_automorphism(a, b)?;
    if k == 0.0 || !k.is_finite() {
        return Err(LoewnerError::InvalidArgument(format!("k must be finite and nonzero, got {k}")));
    }
    let modulus = a.hypot(b);
    let scale = 4.0 / (k * k);
    let integral = quadrature::integrate(|s| (scale * (s * b - modulus * s.cos())).exp(), 0.0, theta, 1e-12, 0.25);
    Ok(c1 + c2 * integral)
}
