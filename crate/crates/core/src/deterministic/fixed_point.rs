use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{LoewnerError, Result};
use crate::herglotz::HerglotzSpec;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const RESIDUAL_TOL: f64 = 1e-11;
const INTERIOR_MARGIN: f64 = 1e-9;

/// Rescaled Koebe function `K(z) = cz/(1 − z)²`.
///
/// Zeros of `(1 − z)²p̃(z) − cz` in the disk are the solutions of `p̃(z) = K(z)`,
/// i.e. the fixed points of `K⁻¹∘p̃`. The deterministic flow uses `c = ik`,
/// the drift of the rotated diffusion uses `c = k²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Koebe {
    pub c: Complex64,
}

impl Koebe {
    pub fn new(c: Complex64) -> Result<Self> {
        if c.norm() == 0.0 || !c.re.is_finite() || !c.im.is_finite() {
            return Err(LoewnerError::Domain(format!("Koebe scale must be finite and nonzero, got {c}")));
        }
        Ok(Self { c })
    }

    pub fn map(&self, z: Complex64) -> Result<Complex64> {
        let u = ONE - z;
        if u.norm() < 1e-12 {
            return Err(LoewnerError::Singular("Koebe map evaluated at z = 1".into()));
        }
        Ok(self.c * z / (u * u))
    }

    /// Principal-branch inverse `(√(4w/c + 1) − 1)/(√(4w/c + 1) + 1)`.
    pub fn inverse(&self, w: Complex64) -> Complex64 {
        let root = (w * 4.0 / self.c + 1.0).sqrt();
        (root - 1.0) / (root + 1.0)
    }
}

/// `K_k(z) = ikz/(1 − z)²`
pub fn koebe_map(k: f64, z: Complex64) -> Result<Complex64> {
    let u = ONE - z;
    if u.norm() < 1e-12 {
        return Err(LoewnerError::Singular("Koebe map evaluated at z = 1".into()));
    }
    Ok(Complex64::new(0.0, k) * z / (u * u))
}

/// `K_k⁻¹(w)`; `k = 0` has no inverse.
pub fn koebe_inverse(k: f64, w: Complex64) -> Result<Complex64> {
    if k == 0.0 {
        return Err(LoewnerError::Domain("the Koebe map degenerates for k = 0".into()));
    }
    Ok(Koebe::new(Complex64::new(0.0, k))?.inverse(w))
}

fn residual(spec: &HerglotzSpec, c: Complex64, z: Complex64) -> Complex64 {
    spec.loewner_field(z) - c * z
}

fn accept(spec: &HerglotzSpec, c: Complex64, z: Complex64) -> bool {
    z.re.is_finite()
        && z.im.is_finite()
        && z.norm() < 1.0 - INTERIOR_MARGIN
        && residual(spec, c, z).norm() <= RESIDUAL_TOL
}

fn newton(spec: &HerglotzSpec, c: Complex64, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..80 {
        let g = residual(spec, c, z);
        if g.norm() <= 0.1 * RESIDUAL_TOL {
            break;
        }
        let dg = spec.loewner_field_derivative(z) - c;
        if dg.norm() < 1e-300 {
            return None;
        }
        let step = g / dg;
        let mut lambda = 1.0;
        let mut next = z - step;
        while next.norm() >= 1.0 && lambda > 1e-6 {
            lambda *= 0.5;
            next = z - step * lambda;
        }
        if next.norm() >= 1.0 || !next.re.is_finite() {
            return None;
        }
        if (next - z).norm() <= 1e-16 {
            z = next;
            break;
        }
        z = next;
    }
    accept(spec, c, z).then_some(z)
}

/// Interior zero of `(1 − z)²p̃(z) − cz`: iterates `K⁻¹∘p̃` from the origin,
/// then falls back to Newton from the origin and a 5×8 polar grid.
pub(crate) fn find_disk_zero(spec: &HerglotzSpec, c: Complex64) -> Option<Complex64> {
    let koebe = Koebe::new(c).ok()?;
    let mut z = Complex64::new(0.0, 0.0);
    for _ in 0..500 {
        let next = koebe.inverse(spec.eval_unchecked(z));
        if !(next.norm() < 1.0) {
            break;
        }
        let done = (next - z).norm() <= 1e-15;
        z = next;
        if done {
            break;
        }
    }
    if z.norm() < 1.0 {
        if let Some(found) = newton(spec, c, z) {
            return Some(found);
        }
    }
    let starts = std::iter::once(Complex64::new(0.0, 0.0)).chain((0..5).flat_map(|i| {
        let r = 0.15 + 0.2 * i as f64;
        (0..8).map(move |j| Complex64::from_polar(r, TAU * j as f64 / 8.0))
    }));
    for start in starts {
        if let Some(found) = newton(spec, c, start) {
            return Some(found);
        }
    }
    None
}

/// Interior zero of the rotating-frame generator `(1 − z)²p̃(z) − ikz`, if any.
pub fn find_fixed_point(spec: &HerglotzSpec, k: f64) -> Option<Complex64> {
    if k == 0.0 || !k.is_finite() {
        return None;
    }
    find_disk_zero(spec, Complex64::new(0.0, k))
}

/// `tan(θ/2) − k/(2(cos θ − 1))`
pub fn boundary_fixed_point_residual(k: f64, theta: f64) -> f64 {
    (theta / 2.0).tan() - k / (2.0 * (theta.cos() - 1.0))
}

/// Roots `θ ∈ (0, 2π)` of `tan(θ/2) = k/(2(cos θ − 1))`.
///
/// With `u = θ/2` the equation is equivalent to `4 sin³u + k cos u = 0`,
/// which has no poles and is bracketed on 512 subintervals of `(0, π)`.
pub fn boundary_fixed_points(k: f64) -> Vec<f64> {
    const CELLS: usize = 512;
    if k == 0.0 || !k.is_finite() {
        return Vec::new();
    }
    let h = |u: f64| 4.0 * u.sin().powi(3) + k * u.cos();
    let width = PI / CELLS as f64;
    let mut roots = Vec::new();
    for j in 0..CELLS {
        let (mut lo, mut hi) = (j as f64 * width, (j + 1) as f64 * width);
        let (mut flo, fhi) = (h(lo), h(hi));
        if flo == 0.0 && j > 0 {
            roots.push(2.0 * lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = h(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(lo + hi);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::{berkson_porta_p0, HerglotzSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn builtin_specs() -> Vec<HerglotzSpec> {
        vec![
            HerglotzSpec::CayleyLinear,
            HerglotzSpec::Cayley,
            HerglotzSpec::ConstantImaginary,
            HerglotzSpec::automorphism(0.6, -0.4).unwrap(),
            HerglotzSpec::Exponential,
        ]
    }

    #[test]
    fn koebe_examples() {
        assert_eq!(koebe_map(1.3, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let z = c(0.3, -0.4);
        let back = koebe_inverse(2.0, koebe_map(2.0, z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-12);
        assert!(koebe_inverse(0.0, z).is_err());
        assert!(koebe_map(1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn koebe_image_of_circle_is_imaginary_ray() {
        for k in [1.0, 2.5, -0.7] {
            for j in 1..64 {
                let theta = TAU * j as f64 / 64.0;
                let w = koebe_map(k, Complex64::from_polar(1.0, theta)).unwrap();
                let s = (theta / 2.0).sin();
                assert!(w.re.abs() < 1e-12);
                assert!((w.im + k / (4.0 * s * s)).abs() < 1e-9 * w.im.abs().max(1.0));
                assert!(w.im.abs() >= k.abs() / 4.0 - 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn koebe_round_trip(r in 0.0..0.95f64, a in 0.0..TAU, k in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64]) {
            let z = Complex64::from_polar(r, a);
            let back = koebe_inverse(k, koebe_map(k, z).unwrap()).unwrap();
            prop_assert!((back - z).norm() < 1e-9);
        }
    }

    #[test]
    fn cayley_linear_fixed_point() {
        let z = find_fixed_point(&HerglotzSpec::CayleyLinear, 1.0).unwrap();
        assert!((z - c(0.5, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn hyperbolic_has_no_interior_fixed_point() {
        let spec = HerglotzSpec::automorphism(1.0, 0.0).unwrap();
        assert!(find_fixed_point(&spec, 1.0).is_none());
        assert!(find_fixed_point(&spec, 0.0).is_none());
    }

    #[test]
    fn constant_imaginary_lower_half_plane() {
        let z = find_fixed_point(&HerglotzSpec::ConstantImaginary, 3.0).unwrap();
        assert!(z.im <= 1e-9);
        assert!((HerglotzSpec::ConstantImaginary.loewner_field(z) - c(0.0, 3.0) * z).norm() <= 1e-11);
    }

    #[test]
    fn berkson_porta_positive_at_true_fixed_point() {
        let tau0 = find_fixed_point(&HerglotzSpec::Cayley, 2.5).unwrap();
        let p = berkson_porta_p0(&HerglotzSpec::Cayley, 2.5, tau0, c(0.0, 0.3)).unwrap();
        assert!(p.re >= -1e-9);
    }

    fn random_taylor(rng: &mut ChaCha8Rng) -> HerglotzSpec {
        let n = rng.random_range(1..6);
        let tail: Vec<Complex64> =
            (0..n).map(|_| Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..TAU))).collect();
        let mass: f64 = tail.iter().map(|a| a.norm()).sum();
        let a0 = c(mass + 0.1 + rng.random_range(0.0..1.0), rng.random_range(-2.0..2.0));
        let mut coeffs = vec![a0];
        coeffs.extend(tail);
        HerglotzSpec::taylor(coeffs).unwrap()
    }

    #[test]
    fn elliptic_fixed_point_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let spec = random_taylor(&mut rng);
            for k in [3.0, 5.0, -3.0, -5.0] {
                let z = find_fixed_point(&spec, k).unwrap_or_else(|| panic!("{spec} k={k}"));
                assert!(z.norm() < 1.0);
                if k > 0.0 {
                    assert!(z.im <= 1e-9, "{spec} k={k} z={z}");
                } else {
                    assert!(z.im >= -1e-9, "{spec} k={k} z={z}");
                }
            }
        }
    }

    #[test]
    fn large_k_fixed_point_approaches_origin() {
        for spec in builtin_specs() {
            let mut k = 1.0;
            let mut hit = None;
            while k <= 64.0 {
                if let Some(z) = find_fixed_point(&spec, k) {
                    if z.norm() <= 0.25 {
                        hit = Some(z);
                        break;
                    }
                }
                k *= 2.0;
            }
            assert!(hit.is_some(), "{spec}");
        }
    }

    #[test]
    fn automorphism_fixed_point_matches_quadratic_root() {
        use crate::deterministic::classify::classify_semigroup;
        for (a, b, k) in [(1.0, 0.0, 2.5), (0.0, 1.0, 0.5), (0.4, 0.3, -3.0)] {
            let spec = HerglotzSpec::automorphism(a, b).unwrap();
            let z = find_fixed_point(&spec, k).unwrap();
            let w = classify_semigroup(a, b, k).unwrap().fixed_point.unwrap();
            assert!((z - w).norm() < 1e-10);
        }
    }

    #[test]
    fn boundary_fixed_point_examples() {
        for k in [-5.0, -1.0, 1.0, 5.0] {
            let roots = boundary_fixed_points(k);
            assert!(!roots.is_empty(), "k={k}");
            for theta in roots {
                assert!(theta > 0.0 && theta < TAU);
                assert!(boundary_fixed_point_residual(k, theta).abs() <= 1e-10, "k={k} theta={theta}");
            }
        }
    }

    #[test]
    fn boundary_roots_for_small_k() {
        let k = 1e-4;
        let roots = boundary_fixed_points(k);
        assert_eq!(roots.len(), 1);
        let gap = TAU - roots[0];
        assert!((gap - 2.0 * (k / 4.0f64).cbrt()).abs() < 1e-3 * gap, "{gap}");
        let roots = boundary_fixed_points(-k);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0 * (k / 4.0f64).cbrt()).abs() < 1e-3 * roots[0]);
    }

    #[test]
    fn boundary_roots_zero_the_circle_generator() {
        // p̃(z) = (1 − z)/(1 + z); the zero set on the circle solves the tan
        // equation with k replaced by −k.
        for k in [-5.0, -1.0, 1.0, 5.0] {
            for theta in boundary_fixed_points(-k) {
                let z = Complex64::from_polar(1.0, theta);
                let g = (ONE - z).powi(3) / (ONE + z) - c(0.0, k) * z;
                assert!(g.norm() < 1e-9, "k={k} theta={theta} g={g}");
            }
        }
    }
}
