#![allow(dead_code)]

use hdk_core::{LayoutAnnotation, Point2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nearest hit of the horizontal ray at longitude `theta` on the closed
/// polygon outline, by brute force over every edge.
pub fn ray_march(corners: &[Point2], theta: f64) -> Option<f64> {
    let (ux, uz) = (theta.sin(), theta.cos());
    let n = corners.len();
    let mut best: Option<f64> = None;
    for i in 0..n {
        let (a, b) = (corners[i], corners[(i + 1) % n]);
        let (ex, ez) = (b[0] - a[0], b[1] - a[1]);
        // solve t·u = a + s·e
        let den = ux * ez - uz * ex;
        if den.abs() < 1e-15 {
            continue;
        }
        let t = (a[0] * ez - a[1] * ex) / den;
        let s = (a[0] * uz - a[1] * ux) / den;
        if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best
}

/// `n` random rooms with 4 to 14 corners.
pub fn random_rooms(seed: u64, n: usize) -> Vec<LayoutAnnotation> {
    use rand::Rng;
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let corners = 2 * r.random_range(2..=7);
            hdk_core::synth::random_manhattan_room(&mut r, corners, 1.0).unwrap()
        })
        .collect()
}
