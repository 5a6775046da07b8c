//! Dormand–Prince 5(4) integration of complex-valued systems.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};

const MIN_STEP: f64 = 1e-14;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (fifth minus embedded fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Initial and maximal step.
    pub max_step: f64,
}

/// Step counters accumulated by an integrator run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejections: usize,
    /// SDE steps that left the disk and were pulled back radially.
    pub projections: usize,
}

/// Adaptive integrator for `y' = f(t, y)` with `y ∈ ℂⁿ`.
///
/// `admissible` is checked on every accepted candidate; a `false` rejects the
/// step and halves it, which is how the disk constraint is enforced.
pub struct Dopri5<F, G>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    G: Fn(&[Complex64]) -> bool,
{
    rhs: F,
    admissible: G,
    tol: Tolerances,
    h: f64,
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    candidate: Vec<Complex64>,
    fsal_valid: bool,
    pub stats: IntegratorStats,
}

impl<F, G> Dopri5<F, G>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    G: Fn(&[Complex64]) -> bool,
{
    pub fn new(dim: usize, rhs: F, admissible: G, tol: Tolerances) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            rhs,
            admissible,
            tol,
            h: tol.max_step,
            k: std::array::from_fn(|_| zero.clone()),
            stage: zero.clone(),
            candidate: zero,
            fsal_valid: false,
            stats: IntegratorStats::default(),
        }
    }

    /// Advances `y` from `t` to `t_end` in place. Consecutive calls must
    /// continue from the state left by the previous call (the last stage is
    /// reused as the first stage of the next step).
    pub fn integrate(&mut self, t: f64, t_end: f64, y: &mut [Complex64]) -> Result<()> {
        let mut t = t;
        if !self.fsal_valid {
            (self.rhs)(t, y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        while t < t_end {
            let remaining = t_end - t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < MIN_STEP && !last {
                return Err(LoewnerError::StepUnderflow { t });
            }
            let err = self.try_step(t, h, y);
            let ok = err <= 1.0 && (self.admissible)(&self.candidate);
            if ok {
                t = if last { t_end } else { t + h };
                y.copy_from_slice(&self.candidate);
                self.k.swap(0, 6);
                self.stats.steps += 1;
                let factor =
                    if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                if !last || factor < 1.0 {
                    self.h = (h * factor).min(self.tol.max_step);
                }
            } else {
                self.stats.rejections += 1;
                let factor =
                    if err.is_finite() && err > 1.0 { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0) } else { 0.5 };
                self.h = h * factor;
                if self.h < MIN_STEP {
                    return Err(LoewnerError::StepUnderflow { t });
                }
            }
        }
        Ok(())
    }

    /// Computes the candidate in `self.candidate` and returns the scaled error norm.
    fn try_step(&mut self, t: f64, h: f64, y: &[Complex64]) -> f64 {
        let n = y.len();
        macro_rules! stage {
            ($dst:expr, $tc:expr, $($coef:expr => $ki:expr),+) => {{
                for j in 0..n {
                    self.stage[j] = y[j] + ($( self.k[$ki][j] * $coef + )+ Complex64::new(0.0, 0.0)) * h;
                }
                (self.rhs)(t + $tc * h, &self.stage, &mut self.k[$dst]);
            }};
        }
        stage!(1, C2, A21 => 0);
        stage!(2, C3, A31 => 0, A32 => 1);
        stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for j in 0..n {
            self.candidate[j] = y[j]
                + (self.k[0][j] * B1 + self.k[2][j] * B3 + self.k[3][j] * B4 + self.k[4][j] * B5 + self.k[5][j] * B6)
                    * h;
        }
        (self.rhs)(t + h, &self.candidate, &mut self.k[6]);
        let mut acc = 0.0_f64;
        for j in 0..n {
            let e = (self.k[0][j] * E1
                + self.k[2][j] * E3
                + self.k[3][j] * E4
                + self.k[4][j] * E5
                + self.k[5][j] * E6
                + self.k[6][j] * E7)
                * h;
            let scale = self.tol.atol + self.tol.rtol * y[j].norm().max(self.candidate[j].norm());
            let r = e.norm() / scale;
            acc = acc.max(r);
        }
        if acc.is_nan() || self.candidate.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            f64::INFINITY
        } else {
            acc
        }
    }
}

/// One classical Runge–Kutta step for a scalar non-autonomous field.
pub fn rk4_step<F: Fn(f64, Complex64) -> Complex64>(f: &F, t: f64, h: f64, y: Complex64) -> Complex64 {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y + k1 * (0.5 * h));
    let k3 = f(t + 0.5 * h, y + k2 * (0.5 * h));
    let k4 = f(t + h, y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances { rtol: 1e-10, atol: 1e-12, max_step: 0.1 }
    }

    #[test]
    fn exponential_decay_with_rotation() {
        let lambda = Complex64::new(-0.5, 3.0);
        let mut solver = Dopri5::new(1, |_, y, dy| dy[0] = lambda * y[0], |_| true, tol());
        let mut y = [Complex64::new(1.0, 0.0)];
        solver.integrate(0.0, 2.0, &mut y).unwrap();
        assert!((y[0] - (lambda * 2.0).exp()).norm() < 1e-9);
        assert!(solver.stats.steps > 0);
    }

    #[test]
    fn non_autonomous_system_in_segments() {
        // y0' = cos t, y1' = y0  ⇒ y0 = sin t, y1 = 1 − cos t
        let mut solver = Dopri5::new(
            2,
            |t, y, dy| {
                dy[0] = Complex64::new(t.cos(), 0.0);
                dy[1] = y[0];
            },
            |_| true,
            tol(),
        );
        let mut y = [Complex64::new(0.0, 0.0); 2];
        let mut t = 0.0;
        for &next in &[0.3, 1.0, 2.5, 4.0] {
            solver.integrate(t, next, &mut y).unwrap();
            t = next;
            assert!((y[0].re - t.sin()).abs() < 1e-9);
            assert!((y[1].re - (1.0 - t.cos())).abs() < 1e-9);
        }
    }

    #[test]
    fn constraint_violation_forces_underflow() {
        let mut solver = Dopri5::new(1, |_, _, dy| dy[0] = Complex64::new(1.0, 0.0), |y| y[0].re <= 0.5, tol());
        let mut y = [Complex64::new(0.0, 0.0)];
        let err = solver.integrate(0.0, 1.0, &mut y).unwrap_err();
        match err {
            LoewnerError::StepUnderflow { t } => assert!((t - 0.5).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(solver.stats.rejections > 0);
    }

    #[test]
    fn rk4_fourth_order() {
        let f = |_t: f64, y: Complex64| y;
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = Complex64::new(1.0, 0.0);
            for j in 0..n {
                y = rk4_step(&f, j as f64 * h, h, y);
            }
            (y.re - 1f64.exp()).abs()
        };
        let ratio = run(10) / run(20);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }
}
