mod common;

use common::{random_rooms, rng};
use hdk_core::{
    annotation_to_boundaries, l1_loss, loss_gradient, make_ray_fan, render_jacobian, render_pair,
    BoundaryPair, HorizonDepthMap, LayoutAnnotation, PairRender, RayFan, Reduction,
};
use rand::Rng;

const STEP: f64 = 1e-6;

fn rel_err(a: f64, f: f64) -> f64 {
    let scale = a.abs().max(f.abs());
    if scale < 1e-6 {
        if (a - f).abs() <= 1e-8 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - f).abs() / scale
    }
}

#[derive(Clone, Copy)]
enum Coord {
    FloorPhi(usize),
    CeilingPhi(usize),
    Theta(usize),
}

fn nudge(pair: &BoundaryPair, c: Coord, delta: f64) -> Option<BoundaryPair> {
    let mut f = pair.floor().phis();
    let mut k = pair.ceiling().phis();
    let mut t = pair.thetas();
    match c {
        Coord::FloorPhi(i) => f[i] += delta,
        Coord::CeilingPhi(i) => k[i] += delta,
        Coord::Theta(i) => t[i] += delta,
    }
    BoundaryPair::from_angles(&t, &f, &k).ok()
}

fn coords(n: usize) -> impl Iterator<Item = Coord> {
    (0..n)
        .map(Coord::FloorPhi)
        .chain((0..n).map(Coord::CeilingPhi))
        .chain((0..n).map(Coord::Theta))
}

fn same_branch(a: &PairRender, b: &PairRender) -> bool {
    let walls = |r: &PairRender| -> Vec<usize> {
        r.traces
            .floor
            .rays
            .iter()
            .chain(&r.traces.ceiling.rays)
            .map(|t| t.active_wall)
            .collect()
    };
    walls(a) == walls(b)
}

/// Corner boundaries of `a` with latitudes jittered off the exact room, so
/// residuals against the room's own render stay away from zero.
fn jittered(a: &LayoutAnnotation, seed: u64) -> BoundaryPair {
    let pair = annotation_to_boundaries(a).unwrap();
    let mut r = rng(seed);
    let mut jitter =
        |p: &f64| p + r.random_range(0.01..0.03) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
    let f: Vec<f64> = pair.floor().phis().iter().map(&mut jitter).collect();
    let c: Vec<f64> = pair.ceiling().phis().iter().map(&mut jitter).collect();
    pair.with_phis(&f, &c).unwrap()
}

fn residuals_keep_sign(a: &PairRender, b: &PairRender, target: &HorizonDepthMap) -> bool {
    let signs = |r: &PairRender| -> Vec<bool> {
        r.floor
            .values()
            .iter()
            .chain(r.ceiling.values())
            .zip(target.values().iter().chain(target.values()))
            .map(|(d, g)| d > g)
            .collect()
    };
    signs(a) == signs(b)
}

struct Tally {
    checked: usize,
    passed: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            passed: 0,
            worst: 0.0,
        }
    }

    fn add(&mut self, analytic: f64, fd: f64) {
        let e = rel_err(analytic, fd);
        self.checked += 1;
        self.passed += usize::from(e <= 1e-4);
        if e.is_finite() {
            self.worst = self.worst.max(e);
        }
    }

    fn fraction(&self) -> f64 {
        self.passed as f64 / self.checked as f64
    }
}

fn jacobian_tally(rooms: &[LayoutAnnotation], fan: &RayFan) -> Tally {
    let mut tally = Tally::new();
    for (k, a) in rooms.iter().enumerate() {
        let pair = jittered(a, k as u64);
        let n = pair.len();
        let base = render_pair(&pair, 1.6, 1.0, fan).unwrap();
        let (jf, jc) = render_jacobian(&pair, 1.6, 1.0, fan, &base.traces).unwrap();
        for c in coords(n) {
            let (Some(up), Some(down)) = (nudge(&pair, c, STEP), nudge(&pair, c, -STEP)) else {
                continue;
            };
            let (Ok(ru), Ok(rd)) = (
                render_pair(&up, 1.6, 1.0, fan),
                render_pair(&down, 1.6, 1.0, fan),
            ) else {
                continue;
            };
            if !same_branch(&ru, &base) || !same_branch(&rd, &base) {
                continue;
            }
            let (col, floor_only, ceiling_only) = match c {
                Coord::FloorPhi(i) => (jf.phi_col(i), true, false),
                Coord::CeilingPhi(i) => (jc.phi_col(i), false, true),
                Coord::Theta(i) => (jf.theta_col(i), false, false),
            };
            for j in 0..fan.count() {
                let surfaces = [
                    (&jf, &ru.floor, &rd.floor, !ceiling_only),
                    (&jc, &ru.ceiling, &rd.ceiling, !floor_only),
                ];
                for (jac, u, d, used) in surfaces {
                    // only the structurally nonzero entries of the row
                    if !used || !jac.row(j).iter().any(|(cc, _)| *cc == col) {
                        continue;
                    }
                    let fd = (u.values()[j] - d.values()[j]) / (2.0 * STEP);
                    tally.add(jac.get(j, col), fd);
                }
            }
        }
    }
    tally
}

#[test]
fn jacobian_matches_finite_differences() {
    let rooms = random_rooms(21, 100);
    let tally = jacobian_tally(&rooms, &make_ray_fan(256).unwrap());
    assert!(tally.checked > 10_000, "{}", tally.checked);
    assert!(
        tally.fraction() >= 0.99,
        "{} of {} (worst {:e})",
        tally.passed,
        tally.checked,
        tally.worst
    );
}

#[test]
fn loss_gradient_matches_finite_differences() {
    let fan = make_ray_fan(256).unwrap();
    let mut tally = Tally::new();
    for (k, a) in random_rooms(22, 100).iter().enumerate() {
        let target = render_pair(&annotation_to_boundaries(a).unwrap(), 1.6, 1.0, &fan)
            .unwrap()
            .floor;
        let pair = jittered(a, 1000 + k as u64);
        let g = loss_gradient(&pair, &target, 1.6, 1.0, &fan, Reduction::Sum).unwrap();
        let base = render_pair(&pair, 1.6, 1.0, &fan).unwrap();
        let n = pair.len();
        for c in coords(n) {
            let (Some(up), Some(down)) = (nudge(&pair, c, STEP), nudge(&pair, c, -STEP)) else {
                continue;
            };
            let (Ok(ru), Ok(rd)) = (
                render_pair(&up, 1.6, 1.0, &fan),
                render_pair(&down, 1.6, 1.0, &fan),
            ) else {
                continue;
            };
            if !same_branch(&ru, &base)
                || !same_branch(&rd, &base)
                || !residuals_keep_sign(&ru, &base, &target)
                || !residuals_keep_sign(&rd, &base, &target)
            {
                continue;
            }
            let loss = |r: &PairRender| l1_loss(&r.floor, &r.ceiling, &target).unwrap();
            let fd = (loss(&ru) - loss(&rd)) / (2.0 * STEP);
            let analytic = match c {
                Coord::FloorPhi(i) => g.floor_phi[i],
                Coord::CeilingPhi(i) => g.ceiling_phi[i],
                Coord::Theta(i) => g.theta[i],
            };
            tally.add(analytic, fd);
        }
    }
    assert!(tally.checked > 1500, "{}", tally.checked);
    assert!(
        tally.fraction() >= 0.99,
        "{} of {} (worst {:e})",
        tally.passed,
        tally.checked,
        tally.worst
    );
}

#[test]
fn mean_reduction_scales_the_gradient() {
    let fan = make_ray_fan(128).unwrap();
    let a = &random_rooms(23, 1)[0];
    let target = render_pair(&annotation_to_boundaries(a).unwrap(), 1.6, 1.0, &fan)
        .unwrap()
        .floor;
    let pair = jittered(a, 5);
    let sum = loss_gradient(&pair, &target, 1.6, 1.0, &fan, Reduction::Sum).unwrap();
    let mean = loss_gradient(&pair, &target, 1.6, 1.0, &fan, Reduction::Mean).unwrap();
    assert!((mean.loss * 128.0 - sum.loss).abs() <= 1e-12 * sum.loss);
    for (m, s) in mean.floor_phi.iter().zip(&sum.floor_phi) {
        assert!((m * 128.0 - s).abs() <= 1e-12 * s.abs().max(1.0));
    }
}
