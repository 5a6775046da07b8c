use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::rational::{rational_within, Fraction};

const I: Complex64 = Complex64::new(0.0, 1.0);
const RATIONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemigroupKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl SemigroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SemigroupKind::Elliptic => "elliptic",
            SemigroupKind::Hyperbolic => "hyperbolic",
            SemigroupKind::Parabolic => "parabolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub kind: SemigroupKind,
    pub discriminant: f64,
    /// Interior zero of the generator; present only for elliptic semigroups.
    pub fixed_point: Option<Complex64>,
}

/// Width of the parabolic band around `D = 0`.
pub fn discriminant_tolerance(a: f64, b: f64, k: f64) -> f64 {
    1e-10 * 1f64.max(k * k).max(a * a).max(b * b)
}

fn check_automorphism(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0) || !b.is_finite() || !a.is_finite() {
        return Err(LoewnerError::InvalidArgument(format!("need finite A >= 0 and B, got A = {a}, B = {b}")));
    }
    if a == 0.0 && b == 0.0 {
        return Err(LoewnerError::InvalidArgument("(A, B) = (0, 0) gives the rotation field only".into()));
    }
    Ok(())
}

/// Roots `w₋, w₊` of `(−A + iB)w² − i(2B + k)w + (A + iB)` for `D < 0`,
/// labelled so that `(ψ − w₋)/(ψ − w₊)` evolves by the factor `e^{−i√(−D)t}`.
fn elliptic_roots(a: f64, b: f64, k: f64, s: f64) -> (Complex64, Complex64) {
    let lead = Complex64::new(-a, b) * 2.0;
    let minus = I * (2.0 * b + k - s) / lead;
    let plus = I * (2.0 * b + k + s) / lead;
    (minus, plus)
}

/// Classifies the semigroup generated by `(1 − z)²(A(1+z)/(1−z) + Bi) − ikz`
/// through `D = 4A² − 4Bk − k²`.
pub fn classify_semigroup(a: f64, b: f64, k: f64) -> Result<ClassificationResult> {
    check_automorphism(a, b)?;
    let d = 4.0 * a * a - 4.0 * b * k - k * k;
    let tol = discriminant_tolerance(a, b, k);
    let (kind, fixed_point) = if d > tol {
        (SemigroupKind::Hyperbolic, None)
    } else if d < -tol {
        let (w1, w2) = elliptic_roots(a, b, k, (-d).sqrt());
        let inside = if w1.norm() < w2.norm() { w1 } else { w2 };
        (SemigroupKind::Elliptic, Some(inside))
    } else {
        (SemigroupKind::Parabolic, None)
    };
    Ok(ClassificationResult { kind, discriminant: d, fixed_point })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedOrbit {
    pub closed: bool,
    /// `k/√(−D)`.
    pub ratio: f64,
    /// Best rational match of `|ratio|`, when one is found.
    pub fraction: Option<Fraction>,
    /// Least `T > 0` with `φ_T = φ_0`.
    pub period: Option<f64>,
}

/// Decides whether the elliptic orbits `φ_t(z)` close up, by matching
/// `k/√(−D)` against continued-fraction convergents.
pub fn is_closed_trajectory(a: f64, b: f64, k: f64, max_denominator: i64) -> Result<ClosedOrbit> {
    let class = classify_semigroup(a, b, k)?;
    if class.kind != SemigroupKind::Elliptic {
        return Err(LoewnerError::InvalidArgument(format!(
            "closed-orbit test needs an elliptic semigroup, got {} (D = {})",
            class.kind.as_str(),
            class.discriminant
        )));
    }
    if k == 0.0 {
        return Err(LoewnerError::InvalidArgument("closed-orbit test needs k != 0".into()));
    }
    if max_denominator < 1 {
        return Err(LoewnerError::InvalidArgument("max_denominator must be >= 1".into()));
    }
    let s = (-class.discriminant).sqrt();
    let ratio = k / s;
    let fraction = rational_within(ratio.abs(), max_denominator, RATIONAL_TOL);
    let period = fraction.map(|f| TAU * f.numerator as f64 / k.abs());
    Ok(ClosedOrbit { closed: fraction.is_some(), ratio, fraction, period })
}

/// `|L(ψ_t, z) − e^{−i√(−D)t}|`, where `L` is the cross-ratio of `ψ_t` and
/// `z` against the two zeros of the elliptic generator.
pub fn implicit_solution_residual(a: f64, b: f64, k: f64, z: Complex64, t: f64, psi_t: Complex64) -> Result<f64> {
    let class = classify_semigroup(a, b, k)?;
    if class.kind != SemigroupKind::Elliptic {
        return Err(LoewnerError::InvalidArgument(format!(
            "implicit solution needs D < 0, got D = {}",
            class.discriminant
        )));
    }
    let s = (-class.discriminant).sqrt();
    let (w_minus, w_plus) = elliptic_roots(a, b, k, s);
    let dens = [psi_t - w_plus, z - w_minus];
    if dens.iter().any(|d| d.norm() < 1e-13) {
        return Err(LoewnerError::Singular("implicit solution factor has a vanishing denominator".into()));
    }
    let lhs = (psi_t - w_minus) / dens[0] * (z - w_plus) / dens[1];
    Ok((lhs - Complex64::from_polar(1.0, -s * t)).norm())
}
