use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brownian::BrownianPath;
use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;
use crate::ode::{rk4_step, IntegratorStats};
use crate::trajectory::{normalize_sample_times, Frame, Method, Trajectory, DISK_SLACK};

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_SPLIT_DEPTH: u32 = 30;
/// Radius SDE iterates are pulled back to when a step leaves the disk.
pub const PROJECTION_RADIUS: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdeScheme {
    Euler,
    #[default]
    Milstein,
}

impl SdeScheme {
    pub fn method(self) -> Method {
        match self {
            SdeScheme::Euler => Method::EulerMaruyama,
            SdeScheme::Milstein => Method::Milstein,
        }
    }
}

/// RK4 for the random ODE `φ' = τ(t)·G(φ/τ(t))`, `τ = e^{ikB_t}`, with `B`
/// linear between grid points and one step per grid cell.
pub(crate) struct Pathwise<'a> {
    pub spec: &'a HerglotzSpec,
    pub k: f64,
    pub path: &'a BrownianPath,
    pub stats: IntegratorStats,
}

impl<'a> Pathwise<'a> {
    pub fn new(spec: &'a HerglotzSpec, k: f64, path: &'a BrownianPath) -> Self {
        Self { spec, k, path, stats: IntegratorStats::default() }
    }

    fn field(&self, t: f64, phi: Complex64) -> Complex64 {
        let tau = Complex64::from_polar(1.0, self.k * self.path.b_at(t));
        tau * self.spec.loewner_field(phi / tau)
    }

    fn advance(&mut self, t0: f64, t1: f64, y: Complex64, depth: u32) -> Result<Complex64> {
        let next = rk4_step(&|t, phi| self.field(t, phi), t0, t1 - t0, y);
        if next.norm() <= 1.0 + DISK_SLACK {
            self.stats.steps += 1;
            return Ok(next);
        }
        if depth >= MAX_SPLIT_DEPTH {
            return Err(LoewnerError::LeftDisk { t: t1, modulus: next.norm() });
        }
        self.stats.rejections += 1;
        let mid = 0.5 * (t0 + t1);
        let y = self.advance(t0, mid, y, depth + 1)?;
        self.advance(mid, t1, y, depth + 1)
    }

    /// `φ` at each of `stops`, which must start at 0 and increase.
    pub fn run(&mut self, z0: Complex64, stops: &[f64]) -> Result<Vec<Complex64>> {
        let path = self.path;
        let tol = 1e-9 * path.dt;
        if let Some(&last) = stops.last() {
            if last > path.duration() + tol {
                return Err(LoewnerError::InvalidArgument(format!(
                    "sample time {last} beyond the path duration {}",
                    path.duration()
                )));
            }
        }
        let mut out = Vec::with_capacity(stops.len());
        out.push(z0);
        let mut y = z0;
        let mut t = 0.0;
        let mut next = 1;
        for j in 0..path.n_steps() {
            if next >= stops.len() {
                break;
            }
            let cell_end = path.time(j + 1);
            while next < stops.len() && stops[next] <= cell_end + tol {
                let s = stops[next];
                if s >= cell_end - tol {
                    y = self.advance(t, cell_end, y, 0)?;
                    t = cell_end;
                } else {
                    y = self.advance(t, s, y, 0)?;
                    t = s;
                }
                out.push(y);
                next += 1;
            }
            if next < stops.len() && t < cell_end {
                y = self.advance(t, cell_end, y, 0)?;
                t = cell_end;
            }
        }
        Ok(out)
    }
}

/// Solves `dφ/dt = (τ − φ)²/τ · p̃(φ/τ)` with `τ(t) = e^{ikB_t}` along `path`.
///
/// An empty `sample_times` samples every grid point of the path.
pub fn evolve_phi_pathwise(
    spec: &HerglotzSpec,
    k: f64,
    z0: Complex64,
    path: &BrownianPath,
    sample_times: &[f64],
) -> Result<Trajectory> {
    if !(z0.norm() <= 1.0) {
        return Err(LoewnerError::Domain(format!("initial point must satisfy |z0| <= 1, got {}", z0.norm())));
    }
    let times = if sample_times.is_empty() {
        path.times()
    } else {
        normalize_sample_times(sample_times, path.duration() * (1.0 + 1e-12))?
    };
    let mut solver = Pathwise::new(spec, k, path);
    let values = solver.run(z0, &times)?;
    Ok(Trajectory {
        times,
        values,
        frame: Frame::Phi,
        method: Method::Rk4Pathwise,
        path_seed: Some(path.seed),
        stats: solver.stats,
    })
}

/// `Ψ_t = φ_t·e^{−ikB_t}` for a pathwise `φ` trajectory on `path`.
pub fn psi_from_phi(phi: &Trajectory, k: f64, path: &BrownianPath) -> Result<Trajectory> {
    if phi.frame != Frame::Phi {
        return Err(LoewnerError::InvalidArgument("expected a phi-frame trajectory".into()));
    }
    let values =
        phi.times.iter().zip(&phi.values).map(|(&t, &v)| v * Complex64::from_polar(1.0, -k * path.b_at(t))).collect();
    Ok(Trajectory { values, frame: Frame::Psi, ..phi.clone() })
}

/// Euler–Maruyama or Milstein for
/// `dΨ = −ikΨ dB + (−k²/2·Ψ + (Ψ − 1)²p̃(Ψ)) dt`, sampled at every grid point.
pub fn evolve_psi_sde(
    spec: &HerglotzSpec,
    k: f64,
    z0: Complex64,
    path: &BrownianPath,
    scheme: SdeScheme,
) -> Result<Trajectory> {
    let mut stats = IntegratorStats::default();
    let mut values = Vec::with_capacity(path.values.len());
    sde_walk(spec, k, z0, path, scheme, &mut stats, |psi| values.push(psi))?;
    Ok(Trajectory {
        times: path.times(),
        values,
        frame: Frame::Psi,
        method: scheme.method(),
        path_seed: Some(path.seed),
        stats,
    })
}

/// Runs the SDE scheme, handing every iterate (including `z0`) to `visit`.
pub(crate) fn sde_walk(
    spec: &HerglotzSpec,
    k: f64,
    z0: Complex64,
    path: &BrownianPath,
    scheme: SdeScheme,
    stats: &mut IntegratorStats,
    mut visit: impl FnMut(Complex64),
) -> Result<Complex64> {
    if !(z0.norm() < 1.0) {
        return Err(LoewnerError::Domain(format!("SDE start must satisfy |z0| < 1, got {}", z0.norm())));
    }
    let dt = path.dt;
    let half_k2 = 0.5 * k * k;
    let mut psi = z0;
    visit(psi);
    for (j, w) in path.values.windows(2).enumerate() {
        let db = w[1] - w[0];
        let drift = spec.loewner_field(psi) - psi * half_k2;
        let mut next = psi + drift * dt - I * k * psi * db;
        if scheme == SdeScheme::Milstein {
            next -= psi * (half_k2 * (db * db - dt));
        }
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(LoewnerError::LeftDisk { t: path.time(j + 1), modulus: next.norm() });
        }
        let r = next.norm();
        if r >= 1.0 {
            next *= PROJECTION_RADIUS / r;
            stats.projections += 1;
        }
        stats.steps += 1;
        psi = next;
        visit(psi);
    }
    Ok(psi)
}

/// `e^{−t}(z + ∫₀ᵗ e^s e^{ikB_s} ds)`, the integral by the trapezoid rule on
/// the path grid.
pub fn example1_pathwise(z: Complex64, k: f64, path: &BrownianPath, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || t > path.duration() * (1.0 + 1e-12) + 1e-12 {
        return Err(LoewnerError::InvalidArgument(format!(
            "t = {t} outside the path duration [0, {}]",
            path.duration()
        )));
    }
    let g = |s: f64, b: f64| Complex64::from_polar(s.exp(), k * b);
    let mut integral = Complex64::new(0.0, 0.0);
    let mut j = 0;
    while j < path.n_steps() && path.time(j + 1) <= t + 1e-9 * path.dt {
        let (s0, s1) = (path.time(j), path.time(j + 1));
        integral += (g(s0, path.values[j]) + g(s1, path.values[j + 1])) * (0.5 * (s1 - s0));
        j += 1;
    }
    let s0 = path.time(j);
    if t > s0 + 1e-9 * path.dt {
        integral += (g(s0, path.values[j]) + g(t, path.b_at(t))) * (0.5 * (t - s0));
    }
    Ok((z + integral) * (-t).exp())
}

/// `E φ_t(z)` for `p̃(w) = 1/(1 − w)` driven by `e^{ikB_t}`.
pub fn mean_phi_example1(z: Complex64, t: f64, k: f64) -> Complex64 {
    let decay = (-t).exp();
    let half_k2 = 0.5 * k * k;
    if (k * k - 2.0).abs() <= 1e-12 {
        return (z + t) * decay;
    }
    z * decay + ((-t * half_k2).exp() - decay) / (1.0 - half_k2)
}
