use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::brownian::{path_seed, sample_brownian_until, BrownianPath, ALGORITHM_ID};
use super::pathwise::{sde_walk, Pathwise, SdeScheme};
use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;
use crate::ode::IntegratorStats;

/// How `Ψ_t(z)` is sampled for expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiSampler {
    /// RK4 for `φ` along the path, then `Ψ = φ·e^{−ikB_t}`.
    #[default]
    Pathwise,
    Euler,
    Milstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub root_seed: u64,
    /// Path resolution.
    pub dt: f64,
    pub sampler: PsiSampler,
}

impl McConfig {
    pub fn new(n_samples: usize, root_seed: u64) -> Self {
        Self { n_samples, root_seed, dt: 1e-3, sampler: PsiSampler::Pathwise }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(LoewnerError::InvalidArgument(format!("need at least 2 samples, got {}", self.n_samples)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(LoewnerError::InvalidArgument(format!("dt must be finite and > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Complex64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Sum in a fixed binary-tree order, independent of how the slice was produced.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |acc, x| acc + x);
    }
    let (left, right) = xs.split_at(xs.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

fn pairwise_sum_real(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (left, right) = xs.split_at(xs.len() / 2);
    pairwise_sum_real(left) + pairwise_sum_real(right)
}

impl McEstimate {
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(LoewnerError::InvalidArgument(format!("need at least 2 samples, got {n}")));
        }
        if samples.iter().all(|x| *x == samples[0]) {
            return Ok(Self { mean: samples[0], std_error: 0.0, n_samples: n });
        }
        let mean = pairwise_sum(samples) / n as f64;
        let sq: Vec<f64> = samples.iter().map(|x| (x - mean).norm_sqr()).collect();
        let var = pairwise_sum_real(&sq) / (n - 1) as f64;
        Ok(Self { mean, std_error: (var / n as f64).sqrt(), n_samples: n })
    }

    /// Whether `value` lies within `n_se` standard errors of the mean.
    pub fn agrees_with(&self, value: Complex64, n_se: f64) -> bool {
        (self.mean - value).norm() <= n_se * self.std_error
    }
}

/// Runs `f(j, seed_j)` for `j = 0..n` in parallel and returns the results in
/// index order, so reductions do not depend on scheduling.
pub fn map_paths<T, F>(n: usize, root_seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    (0..n).into_par_iter().map(|j| f(j, path_seed(root_seed, j as u64))).collect()
}

/// `Ψ_s(z)` at each `stops[i]` for each start point, along one path.
pub(crate) fn sample_psi(
    spec: &HerglotzSpec,
    k: f64,
    starts: &[Complex64],
    path: &BrownianPath,
    stops: &[f64],
    sampler: PsiSampler,
) -> Result<Vec<Vec<Complex64>>> {
    starts
        .iter()
        .map(|&z| match sampler {
            PsiSampler::Pathwise => {
                let phi = Pathwise::new(spec, k, path).run(z, stops)?;
                Ok(phi.iter().zip(stops).map(|(p, &s)| p * Complex64::from_polar(1.0, -k * path.b_at(s))).collect())
            }
            PsiSampler::Euler | PsiSampler::Milstein => {
                let scheme = if sampler == PsiSampler::Euler { SdeScheme::Euler } else { SdeScheme::Milstein };
                let mut all = Vec::with_capacity(path.values.len());
                sde_walk(spec, k, z, path, scheme, &mut IntegratorStats::default(), |psi| all.push(psi))?;
                stops
                    .iter()
                    .map(|&s| {
                        let j = path.index_of(s).ok_or_else(|| {
                            LoewnerError::InvalidArgument(format!("SDE samplers need grid times, got {s}"))
                        })?;
                        Ok(all[j])
                    })
                    .collect()
            }
        })
        .collect()
}

/// Monte Carlo estimate of `(T_t f)(z) = E f(Ψ_t(z))`.
pub fn expectation_tt<F>(spec: &HerglotzSpec, k: f64, t: f64, z: Complex64, f: F, cfg: &McConfig) -> Result<McEstimate>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    cfg.validate()?;
    if !(t >= 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if !(z.norm() < 1.0) {
        return Err(LoewnerError::Domain(format!("z must lie in the open disk, got |z| = {}", z.norm())));
    }
    if t == 0.0 {
        return McEstimate::from_samples(&vec![f(z); cfg.n_samples]);
    }
    let samples = map_paths(cfg.n_samples, cfg.root_seed, |_, seed| {
        let path = sample_brownian_until(seed, cfg.dt, t)?;
        let psi = sample_psi(spec, k, &[z], &path, &[0.0, t], cfg.sampler)?;
        Ok(f(psi[0][1]))
    })?;
    McEstimate::from_samples(&samples)
}

/// Named estimate recorded in a Monte Carlo manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub name: String,
    pub t: f64,
    pub z: Complex64,
    pub estimate: McEstimate,
    pub reference: Option<Complex64>,
}

pub const MC_MANIFEST_VERSION: u32 = 1;

/// JSON record of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McManifest {
    pub schema_version: u32,
    pub root_seed: u64,
    pub algorithm_id: String,
    pub n_samples: usize,
    pub dt: f64,
    pub sampler: PsiSampler,
    pub spec: HerglotzSpec,
    pub k: f64,
    pub estimates: Vec<EstimateRecord>,
}

impl McManifest {
    pub fn new(cfg: &McConfig, spec: &HerglotzSpec, k: f64) -> Self {
        Self {
            schema_version: MC_MANIFEST_VERSION,
            root_seed: cfg.root_seed,
            algorithm_id: ALGORITHM_ID.to_owned(),
            n_samples: cfg.n_samples,
            dt: cfg.dt,
            sampler: cfg.sampler,
            spec: spec.clone(),
            k,
            estimates: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::moments::mu1_closed_form;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_at_time_zero() {
        let cfg = McConfig::new(100, 1);
        let z = c(0.3, -0.2);
        let e = expectation_tt(&HerglotzSpec::Cayley, 1.0, 0.0, z, |w| w * w, &cfg).unwrap();
        assert_eq!(e.mean, z * z);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n_samples, 100);
    }

    #[test]
    fn estimates_are_independent_of_thread_count() {
        let cfg = McConfig { dt: 1e-2, ..McConfig::new(500, 77) };
        let run = || expectation_tt(&HerglotzSpec::Exponential, 1.5, 0.7, c(0.1, 0.1), |w| w, &cfg).unwrap();
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(serial, parallel);
    }

    #[test]
    fn first_moment_matches_closed_form() {
        let cfg = McConfig::new(10_000, 2024);
        let z = c(0.2, 0.3);
        for t in [0.5, 1.0] {
            let e = expectation_tt(&HerglotzSpec::CayleyLinear, 1.0, t, z, |w| w, &cfg).unwrap();
            assert!(e.agrees_with(mu1_closed_form(z, t, 1.0), 3.0), "t={t} {e:?}");
        }
    }

    #[test]
    fn sde_samplers_agree_with_pathwise_in_mean() {
        let z = c(0.2, 0.3);
        let want = mu1_closed_form(z, 0.5, 1.0);
        for sampler in [PsiSampler::Euler, PsiSampler::Milstein] {
            let cfg = McConfig { sampler, ..McConfig::new(10_000, 5) };
            let e = expectation_tt(&HerglotzSpec::CayleyLinear, 1.0, 0.5, z, |w| w, &cfg).unwrap();
            assert!(e.agrees_with(want, 3.0), "{sampler:?} {e:?}");
        }
    }

    #[test]
    fn semigroup_in_mean() {
        // u(s, w) = E Ψ_s(w) is affine in w for p̃ = 1/(1 − w)
        let (k, s, t) = (1.0, 0.4, 0.6);
        let z = c(-0.1, 0.5);
        let u_s = move |w: Complex64| mu1_closed_form(w, s, k);
        let cfg = McConfig::new(10_000, 99);
        let e = expectation_tt(&HerglotzSpec::CayleyLinear, k, t, z, u_s, &cfg).unwrap();
        assert!(e.agrees_with(mu1_closed_form(z, s + t, k), 3.0), "{e:?}");
    }

    #[test]
    fn operator_norm_bound() {
        let cfg = McConfig { dt: 1e-2, ..McConfig::new(2_000, 3) };
        for spec in [HerglotzSpec::Cayley, HerglotzSpec::Exponential, HerglotzSpec::ConstantImaginary] {
            for m in 1..4 {
                let e = expectation_tt(&spec, 2.0, 0.8, c(0.6, -0.3), |w| w.powi(m), &cfg).unwrap();
                assert!(e.mean.norm() <= 1.0 + 3.0 * e.std_error);
            }
        }
    }

    #[test]
    fn standard_error_formula() {
        let xs = [c(1.0, 0.0), c(3.0, 0.0), c(2.0, 2.0), c(2.0, -2.0)];
        let e = McEstimate::from_samples(&xs).unwrap();
        assert_eq!(e.mean, c(2.0, 0.0));
        // Σ|x − m|² = 1 + 1 + 4 + 4 = 10
        assert!((e.std_error - (10.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(McEstimate::from_samples(&xs[..1]).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let cfg = McConfig::new(10, 1);
        let mut m = McManifest::new(&cfg, &HerglotzSpec::Cayley, 1.0);
        m.estimates.push(EstimateRecord {
            name: "mu1".into(),
            t: 0.5,
            z: c(0.0, 0.0),
            estimate: McEstimate { mean: c(0.1, 0.2), std_error: 0.01, n_samples: 10 },
            reference: None,
        });
        let back: McManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
