use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;
use crate::ode::{Dopri5, Tolerances};
use crate::trajectory::{normalize_sample_times, Frame, Method, Trajectory, DISK_SLACK};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Radius used as an interior stand-in for the unit circle.
pub const BOUNDARY_PROXY_RADIUS: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    /// Rotation rate of the attracting point.
    pub k: f64,
    pub t_end: f64,
    /// Initial and maximal integrator step.
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl EvolutionConfig {
    pub fn new(k: f64, t_end: f64, dt: f64) -> Self {
        Self { k, t_end, dt, rtol: 1e-10, atol: 1e-12 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LoewnerError::InvalidArgument(m));
        if !self.k.is_finite() {
            return bad(format!("k must be finite, got {}", self.k));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be finite and >= 0, got {}", self.t_end));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return bad(format!("dt = {} exceeds t_end = {}", self.dt, self.t_end));
        }
        for (name, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return bad(format!("{name} must lie in (0, 1e-2], got {v}"));
            }
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.rtol, atol: self.atol, max_step: self.dt }
    }
}

fn run<F>(rhs: F, cfg: &EvolutionConfig, z0: Complex64, sample_times: &[f64], frame: Frame) -> Result<Trajectory>
where
    F: Fn(f64, Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(z0.norm() <= 1.0) {
        return Err(LoewnerError::Domain(format!("initial point must satisfy |z0| <= 1, got {}", z0.norm())));
    }
    let times = normalize_sample_times(sample_times, cfg.t_end)?;
    let mut solver =
        Dopri5::new(1, |t, y, dy| dy[0] = rhs(t, y[0]), |y| y[0].norm() <= 1.0 + DISK_SLACK, cfg.tolerances());
    let mut state = [z0];
    let mut values = Vec::with_capacity(times.len());
    values.push(z0);
    for pair in times.windows(2) {
        solver.integrate(pair[0], pair[1], &mut state)?;
        values.push(state[0]);
    }
    Ok(Trajectory { times, values, frame, method: Method::Dopri5, path_seed: None, stats: solver.stats })
}

/// Solves `dφ/dt = (τ − φ)²/τ · p̃(φ/τ)`, `τ(t) = e^{ikt}`, `φ_0 = z0`.
///
/// The returned samples start at `t = 0` even when `sample_times` does not.
pub fn evolve_phi(
    spec: &HerglotzSpec,
    cfg: &EvolutionConfig,
    z0: Complex64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    let k = cfg.k;
    run(
        |t, phi| {
            let tau = Complex64::from_polar(1.0, k * t);
            tau * spec.loewner_field(phi / tau)
        },
        cfg,
        z0,
        sample_times,
        Frame::Phi,
    )
}

/// Solves the autonomous rotating-frame equation `dψ/dt = (ψ − 1)²p̃(ψ) − ikψ`.
pub fn evolve_psi(
    spec: &HerglotzSpec,
    cfg: &EvolutionConfig,
    z0: Complex64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    let k = cfg.k;
    run(|_, psi| spec.loewner_field(psi) - I * k * psi, cfg, z0, sample_times, Frame::Psi)
}

/// Image of the circle of radius `1 − 1e−6` under `φ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryImage {
    pub t: f64,
    pub k: f64,
    pub points: Vec<Complex64>,
    /// `τ(t)`, marked on plots.
    pub tau: Complex64,
}

/// Maps `n_points` equispaced points of the boundary proxy circle by `φ_t`.
pub fn boundary_image(spec: &HerglotzSpec, k: f64, t: f64, n_points: usize) -> Result<BoundaryImage> {
    if n_points < 16 {
        return Err(LoewnerError::InvalidArgument(format!("need at least 16 boundary points, got {n_points}")));
    }
    if !(t >= 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let cfg = EvolutionConfig::new(k, t, if t > 0.0 { t.min(0.05) } else { 0.05 });
    let points = (0..n_points)
        .into_par_iter()
        .map(|j| {
            let z0 = Complex64::from_polar(BOUNDARY_PROXY_RADIUS, std::f64::consts::TAU * j as f64 / n_points as f64);
            if t == 0.0 {
                return Ok(z0);
            }
            evolve_phi(spec, &cfg, z0, &[t])
                .map(|tr| tr.values[tr.values.len() - 1])
                .map_err(|e| LoewnerError::BoundaryPoint { index: j, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryImage { t, k, points, tau: Complex64::from_polar(1.0, k * t) })
}

/// Closed forms for `p̃(w) = 1/(1 − w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1 {
    pub phi: Complex64,
    pub psi: Complex64,
    /// Denjoy–Wolff point of the map `φ_t`.
    pub denjoy_wolff: Complex64,
}

/// `φ_t(z) = e^{−t}z + (e^{ikt} − e^{−t})/(1 + ik)`
pub fn example1_phi(z: Complex64, t: f64, k: f64) -> Complex64 {
    let decay = (-t).exp();
    z * decay + (Complex64::from_polar(1.0, k * t) - decay) / Complex64::new(1.0, k)
}

/// `ψ_t(z) = e^{−t(1+ik)}z + (1 − e^{−t(1+ik)})/(1 + ik)`
pub fn example1_psi(z: Complex64, t: f64, k: f64) -> Complex64 {
    let rate = Complex64::new(1.0, k);
    let e = (-rate * t).exp();
    z * e + (Complex64::new(1.0, 0.0) - e) / rate
}

/// `DW(t) = (e^{t+ikt} − 1)/((1 + ik)(e^t − 1))`, the fixed point of `φ_t`.
pub fn example1_denjoy_wolff(t: f64, k: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(LoewnerError::Domain(format!("Denjoy-Wolff point of phi_t needs t > 0, got {t}")));
    }
    let num = Complex64::new(t, k * t).exp() - 1.0;
    Ok(num / (Complex64::new(1.0, k) * t.exp_m1()))
}

pub fn example1_reference(z: Complex64, t: f64, k: f64) -> Result<Example1> {
    Ok(Example1 { phi: example1_phi(z, t, k), psi: example1_psi(z, t, k), denjoy_wolff: example1_denjoy_wolff(t, k)? })
}
