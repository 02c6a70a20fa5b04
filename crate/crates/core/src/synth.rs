//! Named fixture rooms and a random Manhattan room generator.
//!
//! Every room here is star-shaped from the camera: a single panorama sees
//! all of its corners, which the boundary representation requires.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::error::Result;
use crate::layout::{annotation_to_boundaries, LayoutAnnotation, DEFAULT_CAMERA_HEIGHT};
use crate::polygon::{self, Point2};

const FIXTURES: [(&str, &[Point2]); 10] = [
    (
        "square",
        &[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
    ),
    (
        "rectangle",
        &[[-1.5, -1.2], [2.5, -1.2], [2.5, 1.8], [-1.5, 1.8]],
    ),
    (
        "l_room",
        &[
            [-1.5, -1.2],
            [2.5, -1.2],
            [2.5, 0.6],
            [0.8, 0.6],
            [0.8, 2.2],
            [-1.5, 2.2],
        ],
    ),
    (
        "t_room",
        &[
            [-0.8, -3.2],
            [0.9, -3.2],
            [0.9, -0.5],
            [2.6, -0.5],
            [2.6, 0.7],
            [-2.3, 0.7],
            [-2.3, -0.5],
            [-0.8, -0.5],
        ],
    ),
    (
        "bay_room",
        &[
            [-2.0, -1.5],
            [2.0, -1.5],
            [2.0, 1.5],
            [1.0, 1.5],
            [1.0, 2.6],
            [-0.5, 2.6],
            [-0.5, 1.5],
            [-2.0, 1.5],
        ],
    ),
    (
        "room8",
        &[
            [-2.0, -1.5],
            [1.2, -1.5],
            [1.2, -0.7],
            [2.4, -0.7],
            [2.4, 1.8],
            [-0.9, 1.8],
            [-0.9, 1.0],
            [-2.0, 1.0],
        ],
    ),
    (
        "room10a",
        &[
            [-2.2, -1.8],
            [1.7, -1.8],
            [1.7, -1.1],
            [2.6, -1.1],
            [2.6, 1.0],
            [1.4, 1.0],
            [1.4, 2.0],
            [-1.4, 2.0],
            [-1.4, 1.1],
            [-2.2, 1.1],
        ],
    ),
    (
        "room10b",
        &[
            [-0.6, -2.4],
            [3.1, -2.4],
            [3.1, 0.8],
            [2.0, 0.8],
            [2.0, 1.6],
            [-1.9, 1.6],
            [-1.9, -1.2],
            [-1.3, -1.2],
            [-1.3, -1.9],
            [-0.6, -1.9],
        ],
    ),
    (
        "room12a",
        &[
            [-1.5, -2.0],
            [1.4, -2.0],
            [1.4, -0.9],
            [2.0, -0.9],
            [2.0, 1.4],
            [1.3, 1.4],
            [1.3, 2.3],
            [-1.4, 2.3],
            [-1.4, 1.5],
            [-2.4, 1.5],
            [-2.4, -1.3],
            [-1.5, -1.3],
        ],
    ),
    (
        "room12b",
        &[
            [-2.0, -1.7],
            [-0.7, -1.7],
            [-0.7, -2.9],
            [0.9, -2.9],
            [0.9, -1.7],
            [2.5, -1.7],
            [2.5, 1.1],
            [1.7, 1.1],
            [1.7, 1.9],
            [-1.1, 1.9],
            [-1.1, 1.2],
            [-2.0, 1.2],
        ],
    ),
];

/// Names of the built-in fixture rooms, smallest corner count first.
pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(name, _)| *name).collect()
}

pub fn fixture(name: &str, ceiling_ratio: f64) -> Option<LayoutAnnotation> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, corners)| {
            LayoutAnnotation::new(corners.to_vec(), DEFAULT_CAMERA_HEIGHT, ceiling_ratio)
                .expect("fixture rooms are valid")
        })
}

/// All fixtures with `R = 1`.
pub fn fixture_suite() -> Vec<(&'static str, LayoutAnnotation)> {
    fixture_names()
        .into_iter()
        .map(|n| (n, fixture(n, 1.0).expect("listed fixture")))
        .collect()
}

/// Axis-aligned kernel `[x_lo, x_hi] × [z_lo, z_hi]` of a counter-clockwise
/// rectilinear polygon, or `None` when empty.
pub fn rectilinear_kernel(corners: &[Point2]) -> Option<[f64; 4]> {
    let mut k = [
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
    ];
    let n = corners.len();
    for i in 0..n {
        let (p, q) = (corners[i], corners[(i + 1) % n]);
        // interior lies to the left of each edge
        if p[1] == q[1] {
            if q[0] > p[0] {
                k[2] = k[2].max(p[1]);
            } else {
                k[3] = k[3].min(p[1]);
            }
        } else if q[1] > p[1] {
            k[1] = k[1].min(p[0]);
        } else {
            k[0] = k[0].max(p[0]);
        }
    }
    (k[0] < k[1] && k[2] < k[3]).then_some(k)
}

/// Sorted draws from `lo..hi` whose gaps all exceed `gap`.
fn spaced<R: Rng + ?Sized>(rng: &mut R, count: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > gap) {
            return v;
        }
    }
}

/// Staircase notch replacing rectangle corner `p`, entered along `e_in` and
/// left along `e_out`, with `steps` steps.
fn staircase<R: Rng + ?Sized>(
    rng: &mut R,
    p: Point2,
    e_in: Point2,
    e_out: Point2,
    in_len: f64,
    out_len: f64,
    steps: usize,
) -> Vec<Point2> {
    if steps == 0 {
        return vec![p];
    }
    let at = |a: f64, b: f64| {
        [
            p[0] - a * e_in[0] + b * e_out[0],
            p[1] - a * e_in[1] + b * e_out[1],
        ]
    };
    // each notch stays within 45% of both sides so notches never meet
    let mut a = spaced(rng, steps, 0.08 * in_len, 0.45 * in_len, 0.04 * in_len);
    a.reverse();
    let b = spaced(rng, steps, 0.08 * out_len, 0.45 * out_len, 0.04 * out_len);
    let mut out = vec![at(a[0], 0.0)];
    for k in 0..steps {
        out.push(at(a[k], b[k]));
        let next_a = if k + 1 < steps { a[k + 1] } else { 0.0 };
        out.push(at(next_a, b[k]));
    }
    out
}

/// Random simple Manhattan room with `corners` corners (even, 4 to 14 or
/// more), camera strictly inside the kernel, rotated by a random angle.
///
/// The room is a rectangle whose corners are replaced by random staircase
/// notches; each step adds two corners.
pub fn random_manhattan_room<R: Rng + ?Sized>(
    rng: &mut R,
    corners: usize,
    ceiling_ratio: f64,
) -> Result<LayoutAnnotation> {
    if corners < 4 || corners % 2 == 1 {
        return Err(crate::Error::Domain(format!(
            "a Manhattan room needs an even corner count ≥ 4, got {corners}"
        )));
    }
    loop {
        let (w, h) = (rng.random_range(3.0..8.0), rng.random_range(3.0..8.0));
        let mut steps = [0usize; 4];
        for _ in 0..(corners - 4) / 2 {
            steps[rng.random_range(0..4)] += 1;
        }
        // counter-clockwise rectangle corners with their incoming and
        // outgoing edge directions
        let rect: [(Point2, Point2, Point2, f64, f64); 4] = [
            ([0.0, 0.0], [0.0, -1.0], [1.0, 0.0], h, w),
            ([w, 0.0], [1.0, 0.0], [0.0, 1.0], w, h),
            ([w, h], [0.0, 1.0], [-1.0, 0.0], h, w),
            ([0.0, h], [-1.0, 0.0], [0.0, -1.0], w, h),
        ];
        let mut poly = Vec::with_capacity(corners);
        for (k, &(p, e_in, e_out, in_len, out_len)) in rect.iter().enumerate() {
            poly.extend(staircase(rng, p, e_in, e_out, in_len, out_len, steps[k]));
        }
        let Some([x0, x1, z0, z1]) = rectilinear_kernel(&poly) else {
            continue;
        };
        let (mx, mz) = (0.2 * (x1 - x0), 0.2 * (z1 - z0));
        let cam = [
            rng.random_range(x0 + mx..x1 - mx),
            rng.random_range(z0 + mz..z1 - mz),
        ];
        let (s, c) = rng.random_range(0.0..FRAC_PI_2).sin_cos();
        let placed: Vec<Point2> = poly
            .iter()
            .map(|p| {
                let (dx, dz) = (p[0] - cam[0], p[1] - cam[1]);
                [c * dx - s * dz, s * dx + c * dz]
            })
            .collect();
        if !polygon::is_simple(&placed) {
            continue;
        }
        let Ok(a) = LayoutAnnotation::new(placed, DEFAULT_CAMERA_HEIGHT, ceiling_ratio) else {
            continue;
        };
        // rejects the measure-zero case of a corner hiding behind another
        if annotation_to_boundaries(&a).is_ok() {
            return Ok(a);
        }
    }
}
