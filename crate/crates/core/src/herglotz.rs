//! Herglotz driving functions `p̃` and the vector fields built from them.
//!
//! A Herglotz function is holomorphic in the unit disk with non-negative real
//! part. Every evolution in this crate is driven by one of the variants of
//! [`HerglotzSpec`], either through the rotating-frame field
//! `(1 − w)² p̃(w)` or through its Taylor coefficients.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LoewnerError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on `Re p̃` used when admitting a Taylor series.
pub const TAYLOR_ADMISSIBILITY_TOL: f64 = -1e-9;
const TAYLOR_GRID_ANGLES: usize = 256;
const TAYLOR_GRID_RADII: usize = 64;
const POLE_EPS: f64 = 1e-12;

/// A finite Maclaurin polynomial `a₀ + a₁z + … + a_N z^N` whose real part is
/// non-negative on the sampled closed disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries(Vec<Complex64>);

impl TaylorSeries {
    /// Admits the polynomial only if `Re p̃ ≥ -1e-9` on a 256×64 polar grid
    /// covering the closed disk. The minimum of a harmonic function sits on
    /// the boundary, which the outermost ring samples.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(LoewnerError::InvalidArgument("taylor series needs at least one coefficient".into()));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LoewnerError::InvalidArgument("taylor coefficients must be finite".into()));
        }
        let series = Self(coefficients);
        let (min_re, at) = series.min_real_part_on_grid();
        if min_re < TAYLOR_ADMISSIBILITY_TOL {
            return Err(LoewnerError::Domain(format!(
                "taylor series is not a Herglotz function: Re p({at}) = {min_re:e}"
            )));
        }
        Ok(series)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.0
    }

    fn min_real_part_on_grid(&self) -> (f64, Complex64) {
        let mut min = (f64::INFINITY, Complex64::new(0.0, 0.0));
        for j in 0..TAYLOR_GRID_RADII {
            let r = (j + 1) as f64 / TAYLOR_GRID_RADII as f64;
            for a in 0..TAYLOR_GRID_ANGLES {
                let z = Complex64::from_polar(r, 2.0 * PI * a as f64 / TAYLOR_GRID_ANGLES as f64);
                let re = self.eval(z).re;
                if re < min.0 {
                    min = (re, z);
                }
            }
        }
        min
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        self.0.iter().enumerate().skip(1).rev().fold(Complex64::new(0.0, 0.0), |acc, (n, &c)| acc * z + c * n as f64)
    }
}

/// Which Herglotz function drives the evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum HerglotzSpec {
    /// `1/(1−z)`
    CayleyLinear,
    /// `(1+z)/(1−z)`
    Cayley,
    /// `i`
    ConstantImaginary,
    /// `A(1+z)/(1−z) + Bi`, `A ≥ 0`: generates disk automorphisms.
    Automorphism {
        a: f64,
        b: f64,
    },
    /// `exp(πz/2)`
    Exponential,
    Taylor(TaylorSeries),
}

impl HerglotzSpec {
    pub fn automorphism(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0) || !b.is_finite() || !a.is_finite() {
            return Err(LoewnerError::InvalidArgument(format!(
                "automorphism spec needs A >= 0 and finite B, got A = {a}, B = {b}"
            )));
        }
        Ok(Self::Automorphism { a, b })
    }

    pub fn taylor(coefficients: Vec<Complex64>) -> Result<Self> {
        TaylorSeries::new(coefficients).map(Self::Taylor)
    }

    /// `(A, B)` when the spec generates automorphisms (`Cayley` is `(1, 0)`,
    /// `ConstantImaginary` is `(0, 1)`).
    pub fn automorphism_parameters(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Cayley => Some((1.0, 0.0)),
            Self::ConstantImaginary => Some((0.0, 1.0)),
            Self::Automorphism { a, b } => Some((a, b)),
            _ => None,
        }
    }

    /// Evaluates `p̃(z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(LoewnerError::Domain(format!(
                "Herglotz functions are evaluated in the open unit disk, got |z| = {}",
                z.norm()
            )));
        }
        if self.has_pole_at_one() && (ONE - z).norm() < POLE_EPS {
            return Err(LoewnerError::Singular(format!("z = {z} is within {POLE_EPS:e} of the pole at 1")));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Evaluates the defining formula without the disk or pole checks.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self {
            Self::CayleyLinear => ONE / (ONE - z),
            Self::Cayley => (ONE + z) / (ONE - z),
            Self::ConstantImaginary => I,
            Self::Automorphism { a, b } => (ONE + z) / (ONE - z) * *a + I * *b,
            Self::Exponential => (z * FRAC_PI_2).exp(),
            Self::Taylor(series) => series.eval(z),
        }
    }

    fn has_pole_at_one(&self) -> bool {
        matches!(self, Self::CayleyLinear | Self::Cayley | Self::Automorphism { .. })
    }

    /// `p̃(0)`
    pub fn value_at_origin(&self) -> Complex64 {
        self.eval_unchecked(Complex64::new(0.0, 0.0))
    }

    /// The Loewner field `(1 − w)² p̃(w)` with the pole at `w = 1` cancelled for
    /// the rational variants, so it is finite on the whole closed disk.
    pub fn loewner_field(&self, w: Complex64) -> Complex64 {
        let u = ONE - w;
        match self {
            Self::CayleyLinear => u,
            Self::Cayley => u * (ONE + w),
            Self::ConstantImaginary => I * u * u,
            Self::Automorphism { a, b } => u * (ONE + w) * *a + I * *b * u * u,
            Self::Exponential => u * u * (w * FRAC_PI_2).exp(),
            Self::Taylor(series) => u * u * series.eval(w),
        }
    }

    /// Complex derivative of [`Self::loewner_field`].
    pub fn loewner_field_derivative(&self, w: Complex64) -> Complex64 {
        let u = ONE - w;
        match self {
            Self::CayleyLinear => -ONE,
            Self::Cayley => w * -2.0,
            Self::ConstantImaginary => I * u * -2.0,
            Self::Automorphism { a, b } => w * (-2.0 * a) - I * *b * u * 2.0,
            Self::Exponential => {
                let e = (w * FRAC_PI_2).exp();
                e * (u * u * FRAC_PI_2 - u * 2.0)
            }
            Self::Taylor(series) => u * u * series.derivative(w) - u * series.eval(w) * 2.0,
        }
    }

    /// Maclaurin coefficients `a₀..a_n`.
    pub fn taylor_coefficients(&self, n: usize) -> Vec<Complex64> {
        let len = n + 1;
        match self {
            Self::CayleyLinear => vec![ONE; len],
            Self::Cayley => (0..len).map(|j| if j == 0 { ONE } else { ONE * 2.0 }).collect(),
            Self::ConstantImaginary => {
                let mut c = vec![Complex64::new(0.0, 0.0); len];
                c[0] = I;
                c
            }
            Self::Automorphism { a, b } => {
                (0..len).map(|j| if j == 0 { Complex64::new(*a, *b) } else { Complex64::new(2.0 * a, 0.0) }).collect()
            }
            Self::Exponential => {
                let mut c = Vec::with_capacity(len);
                let mut term = 1.0;
                for j in 0..len {
                    if j > 0 {
                        term *= FRAC_PI_2 / j as f64;
                    }
                    c.push(Complex64::new(term, 0.0));
                }
                c
            }
            Self::Taylor(series) => {
                let mut c = series.coefficients().to_vec();
                c.resize(len, Complex64::new(0.0, 0.0));
                c.truncate(len);
                c
            }
        }
    }
}

/// Berkson–Porta data `(τ, p)` of an infinitesimal generator
/// `(z − τ)(τ̄z − 1)p(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BerksonPortaData {
    tau: Complex64,
    herglotz: HerglotzSpec,
}

impl BerksonPortaData {
    pub fn new(tau: Complex64, herglotz: HerglotzSpec) -> Result<Self> {
        if tau.norm() > 1.0 + f64::EPSILON {
            return Err(LoewnerError::Domain(format!(
                "attracting point must lie in the closed disk, got |tau| = {}",
                tau.norm()
            )));
        }
        Ok(Self { tau, herglotz })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn herglotz(&self) -> &HerglotzSpec {
        &self.herglotz
    }

    /// The generator `(z − τ)(τ̄z − 1)p(z)`.
    pub fn generator(&self, z: Complex64) -> Result<Complex64> {
        Ok((z - self.tau) * (self.tau.conj() * z - ONE) * self.herglotz.eval(z)?)
    }
}

/// The complete automorphism field `(−A+Bi)z² − 2Biz + (A+Bi) − ikz`.
pub fn automorphism_generator(a: f64, b: f64, k: f64, z: Complex64) -> Complex64 {
    Complex64::new(-a, b) * z * z - I * (2.0 * b) * z + Complex64::new(a, b) - I * k * z
}

/// Herglotz function `p₀` of the Berkson–Porta decomposition of the rotating
/// generator `(z − 1)²p̃(z) − ikz` with attracting point `tau0`.
pub fn berkson_porta_p0(spec: &HerglotzSpec, k: f64, tau0: Complex64, z: Complex64) -> Result<Complex64> {
    let pz = spec.eval(z)?;
    let denominator = (z - tau0) * (tau0.conj() * z - ONE);
    if denominator.norm() < 1e-14 {
        return Err(LoewnerError::Singular(format!("Berkson-Porta denominator vanishes at z = {z} for tau0 = {tau0}")));
    }
    let numerator = (z - ONE) * (z - ONE) * pz - I * k * z;
    Ok(numerator / denominator)
}

/// Parses `re`, `imi`, `re+imi` or `re-imi` (also `i`, `-i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || LoewnerError::Parse(format!("invalid complex literal '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // The imaginary part starts at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() { 0.0 } else { re_text.parse::<f64>().map_err(|_| bad())? };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Inverse of [`parse_complex`]; always writes the `re±imi` form.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for HerglotzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CayleyLinear => f.write_str("cayley-linear"),
            Self::Cayley => f.write_str("cayley"),
            Self::ConstantImaginary => f.write_str("const-i"),
            Self::Automorphism { a, b } => write!(f, "automorphism:{a},{b}"),
            Self::Exponential => f.write_str("exponential"),
            Self::Taylor(series) => {
                let parts: Vec<String> = series.coefficients().iter().map(|&c| format_complex(c)).collect();
                write!(f, "taylor:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for HerglotzSpec {
    type Err = LoewnerError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, args) {
            ("cayley-linear", None) => Ok(Self::CayleyLinear),
            ("cayley", None) => Ok(Self::Cayley),
            ("const-i", None) => Ok(Self::ConstantImaginary),
            ("exponential", None) => Ok(Self::Exponential),
            ("automorphism", Some(args)) => {
                let values: Vec<&str> = args.split(',').collect();
                let [a, b] = values.as_slice() else {
                    return Err(LoewnerError::Parse(format!("expected automorphism:A,B, got '{s}'")));
                };
                let parse = |t: &str| {
                    t.trim().parse::<f64>().map_err(|_| LoewnerError::Parse(format!("invalid number '{t}' in '{s}'")))
                };
                Self::automorphism(parse(a)?, parse(b)?)
            }
            ("taylor", Some(args)) => {
                let coefficients = args.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                Self::taylor(coefficients)
            }
            _ => Err(LoewnerError::Parse(format!(
                "unknown Herglotz spec '{s}' (expected cayley-linear, cayley, const-i, \
                 automorphism:A,B, exponential or taylor:a0,a1,...)"
            ))),
        }
    }
}

impl Serialize for HerglotzSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HerglotzSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn builtin() -> Vec<HerglotzSpec> {
        vec![
            HerglotzSpec::CayleyLinear,
            HerglotzSpec::Cayley,
            HerglotzSpec::ConstantImaginary,
            HerglotzSpec::automorphism(0.7, -1.3).unwrap(),
            HerglotzSpec::Exponential,
            HerglotzSpec::taylor(vec![c(1.0, 0.5), c(0.4, -0.2), c(0.0, 0.3)]).unwrap(),
        ]
    }

    /// Halton points in the open disk (radius uses sqrt for area uniformity).
    fn halton_disk(n: usize) -> Vec<Complex64> {
        fn radical_inverse(mut i: usize, base: usize) -> f64 {
            let (mut f, mut r) = (1.0, 0.0);
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        }
        (1..=n)
            .map(|i| {
                let r = radical_inverse(i, 2).sqrt() * (1.0 - 1e-9);
                Complex64::from_polar(r, 2.0 * PI * radical_inverse(i, 3))
            })
            .collect()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(HerglotzSpec::CayleyLinear.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(HerglotzSpec::Cayley.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let e = HerglotzSpec::Exponential.eval(c(0.5, 0.0)).unwrap();
        assert!((e - c((PI / 4.0).exp(), 0.0)).norm() < 1e-15);
        assert!((e.re - 2.19328).abs() < 1e-5);
        // 30-term Taylor sum as an independent route.
        let series: f64 = (0..30)
            .scan(1.0, |t, n| {
                let v = *t;
                *t *= FRAC_PI_2 * 0.5 / (n + 1) as f64;
                Some(v)
            })
            .sum();
        assert!((e.re - series).abs() < 1e-14);
    }

    #[test]
    fn eval_rejects_outside_disk_and_pole() {
        assert!(matches!(HerglotzSpec::Cayley.eval(c(1.0, 0.0)), Err(LoewnerError::Domain(_))));
        assert!(matches!(HerglotzSpec::Exponential.eval(c(0.0, -1.5)), Err(LoewnerError::Domain(_))));
        let near = c(1.0 - 1e-13, 0.0);
        assert!(matches!(HerglotzSpec::Cayley.eval(near), Err(LoewnerError::Singular(_))));
        assert!(HerglotzSpec::Exponential.eval(near).is_ok());
    }

    #[test]
    fn real_part_nonnegative_on_quasi_random_points() {
        let points = halton_disk(10_000);
        for spec in builtin() {
            for &z in &points {
                let v = spec.eval(z).unwrap();
                assert!(v.re >= -1e-12, "{spec} at {z}: {v}");
            }
        }
    }

    #[test]
    fn exponential_is_herglotz_because_imaginary_part_bounded() {
        for z in halton_disk(2000) {
            assert!((z * FRAC_PI_2).im.abs() < FRAC_PI_2);
        }
    }

    #[test]
    fn taylor_coefficient_examples() {
        assert_eq!(HerglotzSpec::CayleyLinear.taylor_coefficients(3), vec![c(1.0, 0.0); 4]);
        assert_eq!(
            HerglotzSpec::Cayley.taylor_coefficients(3),
            vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]
        );
        assert_eq!(HerglotzSpec::ConstantImaginary.taylor_coefficients(2), vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn cayley_coefficients_match_finite_differences_at_origin() {
        // n-th derivative at 0 by forward differences of the closed form, for n = 1, 2.
        let h = 1e-3;
        let f = |x: f64| (1.0 + x) / (1.0 - x);
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let a = HerglotzSpec::Cayley.taylor_coefficients(2);
        assert!((a[1].re - d1).abs() < 1e-5);
        assert!((a[2].re - d2 / 2.0).abs() < 1e-5);
    }

    #[test]
    fn taylor_coefficients_reproduce_eval() {
        for spec in builtin() {
            let a = spec.taylor_coefficients(40);
            for z in halton_disk(200).into_iter().map(|z| z * 0.5) {
                let sum = a.iter().rev().fold(c(0.0, 0.0), |acc, &an| acc * z + an);
                assert!((sum - spec.eval(z).unwrap()).norm() <= 1e-8, "{spec} at {z}");
            }
        }
    }

    #[test]
    fn automorphism_generator_examples() {
        assert_eq!(automorphism_generator(1.0, 0.0, 0.0, c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(automorphism_generator(1.0, 0.0, 0.0, c(1.0, 0.0)), c(0.0, 0.0));
        let v = automorphism_generator(0.0, 1.0, 0.5, c(0.0, 1.0));
        assert!((v - c(2.5, 0.0)).norm() < 1e-15);
        // Direct route: (1−z)²p̃(z) − ikz.
        let z = c(0.0, 1.0 - 1e-12);
        let direct =
            (ONE - z) * (ONE - z) * HerglotzSpec::automorphism(0.0, 1.0).unwrap().eval(z).unwrap() - I * 0.5 * z;
        assert!((direct - automorphism_generator(0.0, 1.0, 0.5, z)).norm() < 1e-9);
    }

    #[test]
    fn automorphism_generator_is_polynomial_form_of_field() {
        let points = halton_disk(1000);
        for (a, b) in [(1.0, 0.0), (0.3, 2.0), (2.5, -0.75)] {
            let spec = HerglotzSpec::automorphism(a, b).unwrap();
            for &z in &points {
                let lhs = automorphism_generator(a, b, 0.0, z);
                let rhs = (ONE - z) * (ONE - z) * spec.eval(z).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()), "{z}");
                assert!((spec.loewner_field(z) - lhs).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn loewner_field_derivative_matches_cauchy_difference() {
        for spec in builtin() {
            for z in halton_disk(50).into_iter().map(|z| z * 0.9) {
                let h = 1e-6;
                let fd = (spec.loewner_field(z + h) - spec.loewner_field(z - h)) / (2.0 * h);
                let fd_i = (spec.loewner_field(z + I * h) - spec.loewner_field(z - I * h)) / (2.0 * I * h);
                let d = spec.loewner_field_derivative(z);
                assert!((d - fd).norm() < 1e-6 * (1.0 + d.norm()), "{spec} {z}");
                assert!((d - fd_i).norm() < 1e-6 * (1.0 + d.norm()));
            }
        }
    }

    #[test]
    fn berkson_porta_examples() {
        let tau0 = ONE / c(1.0, 1.0);
        let v = berkson_porta_p0(&HerglotzSpec::CayleyLinear, 1.0, tau0, c(0.0, 0.0)).unwrap();
        assert!((v - c(1.0, 1.0)).norm() < 1e-14);
        let v = berkson_porta_p0(&HerglotzSpec::CayleyLinear, 0.0, ONE, c(0.0, 0.0)).unwrap();
        assert!((v - ONE).norm() < 1e-15);
        assert!(matches!(
            berkson_porta_p0(&HerglotzSpec::CayleyLinear, 1.0, tau0, tau0),
            Err(LoewnerError::Singular(_))
        ));
    }

    #[test]
    fn berkson_porta_matches_example_closed_form() {
        for k in [0.5, 1.0, 2.0] {
            let tau0 = ONE / c(1.0, k);
            for j in 0..9 {
                for l in 0..16 {
                    let z = Complex64::from_polar(0.1 * j as f64, 2.0 * PI * l as f64 / 16.0);
                    let got = berkson_porta_p0(&HerglotzSpec::CayleyLinear, k, tau0, z).unwrap();
                    let want = -(1.0 + k * k) / (z - c(1.0, -k));
                    assert!((got - want).norm() <= 1e-12 * (1.0 + want.norm()), "k={k} z={z}");
                }
            }
        }
    }

    #[test]
    fn taylor_admissibility() {
        assert!(HerglotzSpec::taylor(vec![c(1.0, 0.0), c(0.9, 0.0)]).is_ok());
        assert!(matches!(HerglotzSpec::taylor(vec![c(1.0, 0.0), c(1.2, 0.0)]), Err(LoewnerError::Domain(_))));
        assert!(HerglotzSpec::taylor(vec![]).is_err());
        assert!(HerglotzSpec::automorphism(-0.1, 0.0).is_err());
    }

    #[test]
    fn berkson_porta_data_rejects_outside_points() {
        assert!(BerksonPortaData::new(c(1.0, 0.0), HerglotzSpec::Cayley).is_ok());
        assert!(BerksonPortaData::new(c(1.1, 0.0), HerglotzSpec::Cayley).is_err());
        let data = BerksonPortaData::new(c(0.0, 0.0), HerglotzSpec::CayleyLinear).unwrap();
        // τ = 0: G(z) = −z p(z)
        let z = c(0.2, 0.1);
        assert!((data.generator(z).unwrap() + z / (ONE - z)).norm() < 1e-15);
    }

    #[test]
    fn parse_canonical_forms() {
        assert_eq!("cayley-linear".parse::<HerglotzSpec>().unwrap(), HerglotzSpec::CayleyLinear);
        assert_eq!("const-i".parse::<HerglotzSpec>().unwrap(), HerglotzSpec::ConstantImaginary);
        assert_eq!(
            "automorphism:1,-0.5".parse::<HerglotzSpec>().unwrap(),
            HerglotzSpec::Automorphism { a: 1.0, b: -0.5 }
        );
        let t: HerglotzSpec = "taylor:1+0.5i,0.25-0.1i".parse().unwrap();
        assert_eq!(t.taylor_coefficients(1), vec![c(1.0, 0.5), c(0.25, -0.1)]);
        assert!("cayley:1".parse::<HerglotzSpec>().is_err());
        assert!("automorphism:-1,0".parse::<HerglotzSpec>().is_err());
        assert!("nonsense".parse::<HerglotzSpec>().is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.3+0.4i").unwrap(), c(0.3, 0.4));
        assert_eq!(parse_complex("-1e-3-2.5e+2i").unwrap(), c(-1e-3, -250.0));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    proptest! {
        #[test]
        fn complex_format_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = c(re, im);
            prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }

        #[test]
        fn spec_text_round_trips(a in 0.0f64..5.0, b in -5.0f64..5.0, t1r in -0.3f64..0.3, t1i in -0.3f64..0.3) {
            for spec in [
                HerglotzSpec::automorphism(a, b).unwrap(),
                HerglotzSpec::taylor(vec![c(1.0, b), c(t1r, t1i)]).unwrap(),
            ] {
                let back: HerglotzSpec = spec.to_string().parse().unwrap();
                prop_assert_eq!(back, spec);
            }
        }
    }
}
