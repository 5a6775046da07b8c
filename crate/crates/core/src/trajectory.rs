//! Time-stamped complex samples and their CSV/JSON forms.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::ode::IntegratorStats;

/// Slack allowed on `|z| ≤ 1` for numerically integrated trajectories.
pub const DISK_SLACK: f64 = 1e-9;

/// Whether the samples are of `φ_t` or of the rotated `ψ_t = φ_t / τ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Phi,
    Psi,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Phi => "phi",
            Frame::Psi => "psi",
        }
    }
}

/// How the samples were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4).
    Dopri5,
    /// Classical RK4 along a Brownian path, with step splitting.
    Rk4Pathwise,
    EulerMaruyama,
    Milstein,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub frame: Frame,
    pub method: Method,
    /// Seed of the driving Brownian path, for stochastic runs.
    pub path_seed: Option<u64>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, Complex64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    /// Value at an exact sample time.
    pub fn value_at(&self, t: f64) -> Option<Complex64> {
        let idx = self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))?;
        Some(self.values[idx])
    }

    /// Largest modulus over all samples.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV with header `t,re,im,frame`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im,frame\n");
        for (t, z) in self.times.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{},{},{}", z.re, z.im, self.frame.as_str());
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("t,re,im,frame") {
            return Err(LoewnerError::Parse("trajectory CSV must start with 't,re,im,frame'".into()));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut frame = None;
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || LoewnerError::Parse(format!("malformed trajectory CSV row {}", n + 2));
            let cols: Vec<&str> = line.split(',').collect();
            let [t, re, im, fr] = cols.as_slice() else { return Err(bad()) };
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            times.push(parse(t)?);
            values.push(Complex64::new(parse(re)?, parse(im)?));
            let this = match fr.trim() {
                "phi" => Frame::Phi,
                "psi" => Frame::Psi,
                _ => return Err(bad()),
            };
            if frame.is_some_and(|f| f != this) {
                return Err(bad());
            }
            frame = Some(this);
        }
        Ok(Self {
            times,
            values,
            frame: frame.unwrap_or(Frame::Phi),
            method: Method::Dopri5,
            path_seed: None,
            stats: IntegratorStats::default(),
        })
    }
}

/// Checks the sample grid and prepends `t = 0` when missing.
pub(crate) fn normalize_sample_times(sample_times: &[f64], t_end: f64) -> Result<Vec<f64>> {
    let mut times = Vec::with_capacity(sample_times.len() + 1);
    times.push(0.0);
    for (j, &t) in sample_times.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || t > t_end * (1.0 + 1e-12) + 1e-12 {
            return Err(LoewnerError::InvalidArgument(format!("sample time {t} outside [0, {t_end}]")));
        }
        if j == 0 && t == 0.0 {
            continue;
        }
        if t <= times[times.len() - 1] {
            return Err(LoewnerError::InvalidArgument("sample times must be strictly increasing".into()));
        }
        times.push(t);
    }
    Ok(times)
}

/// `0, dt, 2dt, …` up to and including `t_end`.
pub fn uniform_times(t_end: f64, dt: f64) -> Vec<f64> {
    if t_end <= 0.0 {
        return vec![0.0];
    }
    let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    (0..=n).map(|j| if j == n { t_end } else { j as f64 * dt }).collect()
}
