use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};

/// Generator and transform used for increments: ChaCha8 stream seeded from
/// the 64-bit seed, ziggurat standard normals scaled by `√dt`.
pub const ALGORITHM_ID: &str = "chacha8-ziggurat-normal/v1";

/// Discretized standard Brownian motion `B_0 = 0, B_dt, …, B_{N·dt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
    pub algorithm_id: String,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of path `index` in a Monte Carlo run rooted at `root_seed`.
pub fn path_seed(root_seed: u64, index: u64) -> u64 {
    splitmix64(root_seed ^ splitmix64(index))
}

/// Samples `n_steps` Gaussian increments of variance `dt`.
pub fn sample_brownian(seed: u64, dt: f64, n_steps: usize) -> Result<BrownianPath> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(LoewnerError::InvalidArgument(format!("dt must be finite and > 0, got {dt}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = dt.sqrt();
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..n_steps {
        let g: f64 = rng.sample(StandardNormal);
        b += scale * g;
        values.push(b);
    }
    Ok(BrownianPath { dt, values, seed, algorithm_id: ALGORITHM_ID.to_owned() })
}

/// Path on a grid that ends exactly at `t_end`, with step at most `dt`.
pub fn sample_brownian_until(seed: u64, dt: f64, t_end: f64) -> Result<BrownianPath> {
    if !(t_end > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t_end must be > 0, got {t_end}")));
    }
    if !(dt > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    sample_brownian(seed, t_end / n as f64, n)
}

impl BrownianPath {
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn duration(&self) -> f64 {
        self.n_steps() as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|j| self.time(j)).collect()
    }

    /// `B_t`, linearly interpolated between grid points.
    pub fn b_at(&self, t: f64) -> f64 {
        let n = self.n_steps();
        if t <= 0.0 || n == 0 {
            return self.values[0];
        }
        let x = t / self.dt;
        let j = (x.floor() as usize).min(n - 1);
        let frac = x - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    /// Grid index of `t`, if `t` is a grid point up to rounding.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = t / self.dt;
        let j = x.round();
        ((x - j).abs() <= 1e-9 * x.abs().max(1.0) && j >= 0.0 && (j as usize) < self.values.len()).then_some(j as usize)
    }

    /// Every `factor`-th value, i.e. the same path on a grid `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n_steps().is_multiple_of(factor) {
            return Err(LoewnerError::InvalidArgument(format!(
                "coarsening factor {factor} must divide the step count {}",
                self.n_steps()
            )));
        }
        Ok(Self {
            dt: self.dt * factor as f64,
            values: self.values.iter().step_by(factor).copied().collect(),
            seed: self.seed,
            algorithm_id: self.algorithm_id.clone(),
        })
    }

    /// The increments `B_{s+t} − B_s`, `t ≥ 0`, for a grid time `s`.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        let i = self
            .index_of(s)
            .ok_or_else(|| LoewnerError::InvalidArgument(format!("shift {s} is not a grid time of the path")))?;
        let base = self.values[i];
        Ok(Self {
            dt: self.dt,
            values: self.values[i..].iter().map(|b| b - base).collect(),
            seed: self.seed,
            algorithm_id: self.algorithm_id.clone(),
        })
    }

    /// CSV with header `t,B`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,B\n");
        for (j, b) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{b}", self.time(j));
        }
        out
    }
}
