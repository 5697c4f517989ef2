//! Pairwise segment tests on closed planar polylines.

use num_complex::Complex64;

use crate::par;

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Sign of the turn `a -> b -> c`.
pub fn orientation(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    cross(b - a, c - a)
}

fn within_box(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(q1, q2, p1))
        || (d2 == 0.0 && within_box(q1, q2, p2))
        || (d3 == 0.0 && within_box(p1, p2, q1))
        || (d4 == 0.0 && within_box(p1, p2, q2))
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (dot(p - a, ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn segment_distance(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// Adjacent segments `a -> b -> c` fold back onto each other.
fn folds_back(a: Complex64, b: Complex64, c: Complex64) -> bool {
    let u = b - a;
    let v = c - b;
    let scale = u.norm() * v.norm();
    cross(u, v).abs() <= 1e-12 * scale && dot(u, v) < 0.0
}

/// Outcome of a self-intersection scan of a closed polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicityScan {
    /// Offending segment pairs `(i, j)` with `i < j`, in index order.
    pub crossings: Vec<(usize, usize)>,
    /// Smallest distance between non-adjacent segments.
    pub min_separation: f64,
    /// Segment pair realising `min_separation`.
    pub closest_pair: (usize, usize),
}

impl SimplicityScan {
    pub fn is_simple(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// Tests every pair of segments of the closed polyline through `points`
/// (segment `i` joins `points[i]` and `points[(i+1) % n]`).
pub fn scan_closed(points: &[Complex64]) -> SimplicityScan {
    let n = points.len();
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    let rows = par::map_range(n, |i| {
        let (a, b) = seg(i);
        let mut hits = Vec::new();
        let mut best = (f64::INFINITY, (i, i));
        // the fold test covers the shared vertex of neighbouring segments
        let (_, next) = seg((i + 1) % n);
        if n >= 3 && folds_back(a, b, next) {
            let pair = if i + 1 < n { (i, i + 1) } else { (0, i) };
            hits.push(pair);
        }
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            let dist = segment_distance(a, b, c, d);
            if dist == 0.0 {
                hits.push((i, j));
            }
            if dist < best.0 {
                best = (dist, (i, j));
            }
        }
        (hits, best)
    });
    let mut crossings = Vec::new();
    let mut min_separation = f64::INFINITY;
    let mut closest_pair = (0, 0);
    for (hits, (dist, pair)) in rows {
        crossings.extend(hits);
        if dist < min_separation {
            min_separation = dist;
            closest_pair = pair;
        }
    }
    crossings.sort_unstable();
    crossings.dedup();
    SimplicityScan { crossings, min_separation, closest_pair }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn crossing_and_disjoint_segments() {
        assert!(segments_intersect(c(0.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)));
        assert!(!segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)));
        // touching at an endpoint
        assert!(segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 3.0)));
        // collinear overlap and collinear gap
        assert!(segments_intersect(c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)));
        assert!(!segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)));
        assert_eq!(segment_distance(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0), c(1.0, 2.0)), 2.0);
    }

    #[test]
    fn circle_is_simple() {
        let pts: Vec<_> = (0..64).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 64.0)).collect();
        let scan = scan_closed(&pts);
        assert!(scan.is_simple());
        assert!(scan.min_separation > 0.0);
    }

    #[test]
    fn figure_eight_is_not_simple() {
        let pts: Vec<_> = (0..200)
            .map(|k| {
                let t = TAU * k as f64 / 200.0;
                c(t.sin(), (2.0 * t).sin() / 2.0)
            })
            .collect();
        assert!(!scan_closed(&pts).is_simple());
    }

    #[test]
    fn doubly_traversed_segment_is_detected() {
        let pts: Vec<_> = (0..32).map(|k| c(2.0 * (TAU * k as f64 / 32.0).cos(), 0.0)).collect();
        assert!(!scan_closed(&pts).is_simple());
    }
}
