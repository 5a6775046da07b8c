//! Continued-fraction convergents and best rational approximation.

use serde::{Deserialize, Serialize};

/// A reduced fraction `numerator / denominator` with `denominator > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: i64,
    pub denominator: i64,
}

impl Fraction {
    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Convergents `p_n/q_n` of the regular continued fraction of `x`, stopping
/// once the denominator would exceed `max_denominator` or the expansion
/// terminates.
pub fn convergents(x: f64, max_denominator: i64) -> Vec<Fraction> {
    let mut out = Vec::new();
    if !x.is_finite() || max_denominator < 1 {
        return out;
    }
    let (mut p_prev, mut p) = (1_i64, x.floor() as i64);
    let (mut q_prev, mut q) = (0_i64, 1_i64);
    out.push(Fraction { numerator: p, denominator: q });
    let mut rest = x - x.floor();
    while rest > 1e-15 {
        let inv = 1.0 / rest;
        let a = inv.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let (Some(q_next), Some(p_next)) = (
            a.checked_mul(q).and_then(|v| v.checked_add(q_prev)),
            a.checked_mul(p).and_then(|v| v.checked_add(p_prev)),
        ) else {
            break;
        };
        if q_next > max_denominator {
            break;
        }
        (p_prev, p, q_prev, q) = (p, p_next, q, q_next);
        out.push(Fraction { numerator: p, denominator: q });
        rest = inv - inv.floor();
    }
    out
}

/// The first convergent of `x` within `tol` whose denominator is at most
/// `max_denominator`.
pub fn rational_within(x: f64, max_denominator: i64, tol: f64) -> Option<Fraction> {
    convergents(x, max_denominator).into_iter().find(|f| (f.value() - x).abs() <= tol)
}
