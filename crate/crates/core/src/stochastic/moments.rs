use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;
use crate::ode::{Dopri5, Tolerances};
use crate::trajectory::normalize_sample_times;

/// How moments above the truncation order are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    /// `μ_m ≡ 0` above the truncation.
    #[default]
    Zero,
    /// `μ_m ≡ z^m` above the truncation.
    Frozen,
}

impl std::str::FromStr for Closure {
    type Err = LoewnerError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Closure::Zero),
            "frozen" => Ok(Closure::Frozen),
            _ => Err(LoewnerError::Parse(format!("unknown closure '{s}' (expected zero|frozen)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub k: f64,
    pub z: Complex64,
    pub t_end: f64,
    /// Highest reported order `M`.
    pub orders: usize,
    pub truncation: usize,
    pub closure: Closure,
}

/// `μ_m(t) = E Ψ_t(z)^m` for `m = 1..M` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub orders: Vec<usize>,
    pub times: Vec<f64>,
    /// `values[i][m − 1] = μ_m(times[i])`.
    pub values: Vec<Vec<Complex64>>,
    pub truncation: usize,
    pub closure: Closure,
}

impl MomentTable {
    pub fn moment(&self, time_index: usize, m: usize) -> Complex64 {
        self.values[time_index][m - 1]
    }

    /// CSV with header `t,m,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,m,re,im\n");
        for (t, row) in self.times.iter().zip(&self.values) {
            for (m, v) in self.orders.iter().zip(row) {
                let _ = writeln!(out, "{t},{m},{},{}", v.re, v.im);
            }
        }
        out
    }
}

/// `(1 − e^{−(1+k²/2)t})/(1 + k²/2) + z·e^{−(1+k²/2)t}`, the first moment for `p̃ = 1/(1 − w)`.
pub fn mu1_closed_form(z: Complex64, t: f64, k: f64) -> Complex64 {
    let rate = 1.0 + 0.5 * k * k;
    let e = (-rate * t).exp();
    z * e + (1.0 - e) / rate
}

/// Integrates the truncated moment hierarchy
/// `μ_m' = a₀mμ_{m−1} + (a₁ − 2a₀ − mk²/2)mμ_m + Σ_{n≥1}(a_{n−1} − 2aₙ + a_{n+1})mμ_{m+n}`.
pub fn solve_moment_hierarchy(spec: &HerglotzSpec, req: &MomentRequest, sample_times: &[f64]) -> Result<MomentTable> {
    let MomentRequest { k, z, t_end, orders, truncation, closure } = *req;
    if orders == 0 {
        return Err(LoewnerError::InvalidArgument("need at least one moment order".into()));
    }
    if truncation < orders {
        return Err(LoewnerError::InvalidArgument(format!(
            "truncation {truncation} is below the order count {orders}"
        )));
    }
    if !(z.norm() <= 1.0) {
        return Err(LoewnerError::Domain(format!("initial point must satisfy |z| <= 1, got {}", z.norm())));
    }
    if !(t_end >= 0.0) {
        return Err(LoewnerError::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    let times = normalize_sample_times(sample_times, t_end)?;
    let n = truncation;
    let a = spec.taylor_coefficients(n + 1);
    let at = |j: i64| if j < 0 { Complex64::new(0.0, 0.0) } else { a[j as usize] };
    // g_j: Maclaurin coefficients of (1 − w)²p̃(w)
    let g: Vec<Complex64> = (0..=n as i64 + 1).map(|j| at(j) - at(j - 1) * 2.0 + at(j - 2)).collect();
    let half_k2 = 0.5 * k * k;

    let tails: Vec<Complex64> = match closure {
        Closure::Zero => vec![Complex64::new(0.0, 0.0); n],
        Closure::Frozen => {
            let field = spec.loewner_field(z);
            (1..=n)
                .map(|m| {
                    let kept: Complex64 = (0..=n + 1 - m).map(|j| g[j] * z.powi(j as i32)).sum();
                    (field - kept) * z.powi(m as i32 - 1) * m as f64
                })
                .collect()
        }
    };

    let rhs = |_t: f64, mu: &[Complex64], dmu: &mut [Complex64]| {
        for m in 1..=n {
            let mf = m as f64;
            let mut acc = tails[m - 1] - mu[m - 1] * (mf * mf * half_k2);
            for (j, gj) in g.iter().enumerate().take(n + 2 - m) {
                let idx = m + j - 1;
                let moment = if idx == 0 { Complex64::new(1.0, 0.0) } else { mu[idx - 1] };
                acc += gj * moment * mf;
            }
            dmu[m - 1] = acc;
        }
    };
    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, max_step: 0.05 };
    let mut solver = Dopri5::new(n, rhs, |_| true, tol);
    let mut state: Vec<Complex64> = (1..=n).map(|m| z.powi(m as i32)).collect();
    let mut values = vec![state[..orders].to_vec()];
    for w in times.windows(2) {
        solver.integrate(w[0], w[1], &mut state)?;
        values.push(state[..orders].to_vec());
    }
    Ok(MomentTable { orders: (1..=orders).collect(), times, values, truncation, closure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::montecarlo::{expectation_tt, McConfig};
    use crate::trajectory::uniform_times;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn request(k: f64, z: Complex64, orders: usize, truncation: usize, closure: Closure) -> MomentRequest {
        MomentRequest { k, z, t_end: 2.0, orders, truncation, closure }
    }

    #[test]
    fn first_moment_cayley_linear() {
        let z = c(0.3, -0.4);
        for k in [0.0, 1.0, 2.5] {
            let table = solve_moment_hierarchy(
                &HerglotzSpec::CayleyLinear,
                &request(k, z, 3, 3, Closure::Zero),
                &uniform_times(2.0, 0.1),
            )
            .unwrap();
            for (i, &t) in table.times.iter().enumerate() {
                assert!((table.moment(i, 1) - mu1_closed_form(z, t, k)).norm() <= 1e-8);
                for m in 1..=3 {
                    assert!(table.moment(i, m).norm() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn initial_row_is_powers() {
        let z = c(0.5, 0.5);
        for closure in [Closure::Zero, Closure::Frozen] {
            let table = solve_moment_hierarchy(&HerglotzSpec::Cayley, &request(1.0, z, 4, 8, closure), &[1.0]).unwrap();
            for m in 1..=4 {
                assert_eq!(table.moment(0, m), z.powi(m as i32));
            }
        }
        assert!(solve_moment_hierarchy(&HerglotzSpec::Cayley, &request(1.0, z, 4, 3, Closure::Zero), &[1.0]).is_err());
    }

    #[test]
    fn cayley_recurrence() {
        let k = 1.0;
        let z = c(0.2, 0.1);
        let h = 1e-3;
        let t0 = 0.7;
        let table =
            solve_moment_hierarchy(&HerglotzSpec::Cayley, &request(k, z, 3, 24, Closure::Zero), &[t0 - h, t0, t0 + h])
                .unwrap();
        for m in 1..=2 {
            let d = (table.moment(3, m) - table.moment(1, m)) / (2.0 * h);
            let lower = if m == 1 { c(1.0, 0.0) } else { table.moment(2, m - 1) };
            let mf = m as f64;
            let predicted = lower - table.moment(2, m) * (k * k * mf / 2.0) - d / mf;
            assert!((predicted - table.moment(2, m + 1)).norm() <= 1e-6, "m={m}");
        }
    }

    #[test]
    fn truncation_sensitivity_is_small_for_cayley() {
        let z = c(0.4, 0.2);
        let run = |trunc| {
            solve_moment_hierarchy(&HerglotzSpec::Cayley, &request(1.0, z, 3, trunc, Closure::Zero), &[1.0]).unwrap()
        };
        let (a, b) = (run(24), run(48));
        for m in 1..=3 {
            assert!((a.moment(1, m) - b.moment(1, m)).norm() < 1e-10);
        }
    }

    #[test]
    fn frozen_closure_is_exact_at_time_zero_slope() {
        // With frozen closure the initial derivative equals the exact generator
        // applied to w ↦ w^m at z, for any truncation.
        let spec = HerglotzSpec::Exponential;
        let (k, z) = (1.3, c(0.3, -0.2));
        let h = 1e-4;
        let table = solve_moment_hierarchy(&spec, &request(k, z, 2, 3, Closure::Frozen), &[h]).unwrap();
        for m in 1..=2usize {
            let mf = m as f64;
            let drift = spec.loewner_field(z) - z * (0.5 * k * k);
            let exact = drift * z.powi(m as i32 - 1) * mf - z.powi(m as i32) * (0.5 * k * k * mf * (mf - 1.0));
            let slope = (table.moment(1, m) - table.moment(0, m)) / h;
            assert!((slope - exact).norm() < 1e-3, "m={m}");
        }
    }

    #[test]
    fn moments_agree_with_monte_carlo() {
        let z = c(0.3, 0.3);
        let k = 1.0;
        let t = 0.5;
        let cfg = McConfig::new(10_000, 31);
        for spec in [HerglotzSpec::CayleyLinear, HerglotzSpec::Cayley] {
            let table = solve_moment_hierarchy(&spec, &request(k, z, 3, 24, Closure::Zero), &[t]).unwrap();
            let wide = solve_moment_hierarchy(&spec, &request(k, z, 3, 48, Closure::Zero), &[t]).unwrap();
            for m in 1..=3 {
                let e = expectation_tt(&spec, k, t, z, |w| w.powi(m as i32), &cfg).unwrap();
                let trunc = (table.moment(1, m) - wide.moment(1, m)).norm();
                let gap = (e.mean - table.moment(1, m)).norm();
                assert!(gap <= 3.0 * e.std_error + trunc, "{spec} m={m} gap={gap} se={}", e.std_error);
            }
        }
    }
}
