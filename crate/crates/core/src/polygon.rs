//! Planar polygon primitives on floor-plan `(x, z)` coordinates.
//!
//! Intersection areas of simple (possibly non-convex) polygons are computed by
//! ear-clipping both operands into triangles and summing pairwise convex
//! clips. Triangulations partition each polygon, so the sum is exact up to
//! rounding.

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Shoelace signed area, positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let twice: f64 = (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum();
    0.5 * twice
}

pub fn area(poly: &[Point2]) -> f64 {
    signed_area(poly).abs()
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, touching included.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True when the closed polyline has at least three vertices, no zero-length
/// edges and no contact between edges other than shared endpoints of
/// neighbours.
pub fn is_simple(poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 || poly.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return false;
    }
    let edge = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return false;
        }
        // neighbour folding back onto this edge
        let (_, c) = edge((i + 1) % n);
        if orient(a, b, c) == 0.0 && {
            let ab = sub(b, a);
            let bc = sub(c, b);
            ab[0] * bc[0] + ab[1] * bc[1] < 0.0
        } {
            return false;
        }
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = edge(j);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    signed_area(poly) != 0.0
}

/// Distance from `p` to the polygon boundary.
pub fn boundary_distance(poly: &[Point2], p: Point2) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let ab = sub(b, a);
            let ap = sub(p, a);
            let len2 = ab[0] * ab[0] + ab[1] * ab[1];
            let t = if len2 > 0.0 {
                ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
            q[0].hypot(q[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Even-odd point-in-polygon test. Points on the boundary give an arbitrary
/// answer; use [`boundary_distance`] when that matters.
pub fn contains(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Drops vertices whose neighbours make them collinear. They carry no area.
fn drop_collinear(poly: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = poly.to_vec();
    let mut changed = true;
    while changed && out.len() > 3 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let a = out[(i + n - 1) % n];
            let b = out[i];
            let c = out[(i + 1) % n];
            let scale = sub(b, a)[0].hypot(sub(b, a)[1]) * sub(c, b)[0].hypot(sub(c, b)[1]);
            if orient(a, b, c).abs() <= 1e-12 * scale {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    out
}

fn in_triangle(a: Point2, b: Point2, c: Point2, p: Point2) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

/// Ear-clipping triangulation of a simple polygon. Triangles come out
/// counter-clockwise regardless of the input orientation.
pub fn triangulate(poly: &[Point2]) -> Result<Vec<[Point2; 3]>> {
    if !is_simple(poly) {
        return Err(Error::Geometry("polygon is not simple".into()));
    }
    let mut rest = drop_collinear(poly);
    if signed_area(&rest) < 0.0 {
        rest.reverse();
    }
    let mut tris = Vec::with_capacity(rest.len().saturating_sub(2));
    while rest.len() > 3 {
        let n = rest.len();
        let ear = (0..n).find(|&i| {
            let a = rest[(i + n - 1) % n];
            let b = rest[i];
            let c = rest[(i + 1) % n];
            if orient(a, b, c) <= 0.0 {
                return false;
            }
            rest.iter()
                .filter(|&&p| p != a && p != b && p != c)
                .all(|&p| !in_triangle(a, b, c, p))
        });
        let Some(i) = ear else {
            return Err(Error::Geometry("ear clipping found no ear".into()));
        };
        tris.push([rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]]);
        rest.remove(i);
    }
    if orient(rest[0], rest[1], rest[2]) > 0.0 {
        tris.push([rest[0], rest[1], rest[2]]);
    }
    Ok(tris)
}

/// Sutherland-Hodgman clip of `subject` against a counter-clockwise convex `clip`.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for k in 0..m {
        if out.is_empty() {
            break;
        }
        let a = clip[k];
        let b = clip[(k + 1) % m];
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let cur_in = orient(a, b, cur) >= 0.0;
            let prev_in = orient(a, b, prev) >= 0.0;
            if cur_in != prev_in {
                let dp = orient(a, b, prev);
                let dc = orient(a, b, cur);
                let t = dp / (dp - dc);
                out.push([
                    prev[0] + t * (cur[0] - prev[0]),
                    prev[1] + t * (cur[1] - prev[1]),
                ]);
            }
            if cur_in {
                out.push(cur);
            }
        }
    }
    out
}

fn bbox(points: &[Point2]) -> [f64; 4] {
    points.iter().fold(
        [
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ],
        |b, p| {
            [
                b[0].min(p[0]),
                b[1].min(p[1]),
                b[2].max(p[0]),
                b[3].max(p[1]),
            ]
        },
    )
}

/// Area of `a ∩ b` for simple polygons of either orientation.
pub fn intersection_area(a: &[Point2], b: &[Point2]) -> Result<f64> {
    let ta = triangulate(a)?;
    let tb = triangulate(b)?;
    let boxes_b: Vec<[f64; 4]> = tb.iter().map(|t| bbox(t)).collect();
    let mut total = 0.0;
    for t in &ta {
        let ba = bbox(t);
        for (u, bb) in tb.iter().zip(&boxes_b) {
            if ba[0] >= bb[2] || bb[0] >= ba[2] || ba[1] >= bb[3] || bb[1] >= ba[3] {
                continue;
            }
            let piece = clip_convex(t, u);
            if piece.len() >= 3 {
                total += signed_area(&piece).max(0.0);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, z0: f64, s: f64) -> Vec<Point2> {
        vec![[x0, z0], [x0 + s, z0], [x0 + s, z0 + s], [x0, z0 + s]]
    }

    fn l_shape() -> Vec<Point2> {
        vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ]
    }

    #[test]
    fn areas() {
        assert_eq!(signed_area(&square(0.0, 0.0, 1.0)), 1.0);
        let mut cw = square(0.0, 0.0, 1.0);
        cw.reverse();
        assert_eq!(signed_area(&cw), -1.0);
        assert_eq!(area(&l_shape()), 3.0);
    }

    #[test]
    fn simplicity() {
        assert!(is_simple(&l_shape()));
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!is_simple(&bowtie));
        let spike = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(!is_simple(&spike));
        assert!(!is_simple(&[[0.0, 0.0], [1.0, 0.0]]));
    }

    #[test]
    fn triangulation_preserves_area() {
        for poly in [square(0.0, 0.0, 1.0), l_shape()] {
            let tris = triangulate(&poly).unwrap();
            let sum: f64 = tris.iter().map(|t| signed_area(t)).sum();
            assert!((sum - area(&poly)).abs() < 1e-12);
        }
        // collinear vertices along the walls, as produced by dense boundaries
        let mut dense = Vec::new();
        for k in 0..10 {
            dense.push([k as f64 * 0.1, 0.0]);
        }
        for k in 0..10 {
            dense.push([1.0, k as f64 * 0.1]);
        }
        for k in 0..10 {
            dense.push([1.0 - k as f64 * 0.1, 1.0]);
        }
        for k in 0..10 {
            dense.push([0.0, 1.0 - k as f64 * 0.1]);
        }
        let tris = triangulate(&dense).unwrap();
        let sum: f64 = tris.iter().map(|t| signed_area(t)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_examples() {
        let unit = square(0.0, 0.0, 1.0);
        assert!((intersection_area(&unit, &unit).unwrap() - 1.0).abs() < 1e-12);
        let shifted = square(0.5, 0.0, 1.0);
        assert!((intersection_area(&unit, &shifted).unwrap() - 0.5).abs() < 1e-12);
        assert!((intersection_area(&shifted, &unit).unwrap() - 0.5).abs() < 1e-12);
        let far = square(5.0, 5.0, 1.0);
        assert_eq!(intersection_area(&unit, &far).unwrap(), 0.0);
        // L ∩ unit square at the origin is the full square
        assert!((intersection_area(&l_shape(), &unit).unwrap() - 1.0).abs() < 1e-12);
        // L ∩ square covering its notch corner
        let notch = square(0.5, 0.5, 1.0);
        assert!((intersection_area(&l_shape(), &notch).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn self_intersecting_rejected() {
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            intersection_area(&bowtie, &square(0.0, 0.0, 1.0)),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn containment() {
        let l = l_shape();
        assert!(contains(&l, [0.5, 0.5]));
        assert!(contains(&l, [0.5, 1.5]));
        assert!(!contains(&l, [1.5, 1.5]));
        assert!((boundary_distance(&l, [0.5, 0.5]) - 0.5).abs() < 1e-15);
    }
}
