//! Polyline checks used to validate plotted curves.

use num_complex::Complex64;

fn orientation(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Whether the closed segments `[a, b]` and `[c, d]` intersect.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Sweep over segments sorted by their left end: returns the first pair of
/// non-adjacent edges of the closed polygon `points` that intersect.
pub fn closed_polyline_self_intersection(points: &[Complex64]) -> Option<(usize, usize)> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let edge = |j: usize| (points[j], points[(j + 1) % n]);
    let mut order: Vec<usize> = (0..n).collect();
    let left = |j: usize| {
        let (a, b) = edge(j);
        a.re.min(b.re)
    };
    order.sort_by(|&x, &y| left(x).total_cmp(&left(y)));
    for (pos, &i) in order.iter().enumerate() {
        let (a, b) = edge(i);
        let right = a.re.max(b.re);
        for &j in &order[pos + 1..] {
            if left(j) > right {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            let (c, d) = edge(j);
            if segments_intersect(a, b, c, d) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}
