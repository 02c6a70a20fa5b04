//! Ray casting from the camera center against recovered wall planes.
//!
//! Each ray of the fan is intersected with every wall; candidates behind the
//! camera or outside the wall's longitude span are discarded and the nearest
//! survivor is the rendered depth, so nearer walls hide farther ones.

use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::{Error, Result};
use crate::layout::{lift_to_plane, recover_wall_planes, BoundaryPair, WallPlane};
use crate::sphere::{longitude_of, make_ray_fan, RayFan, Vec3};

/// Rays this close to parallel with a wall produce no candidate.
pub const PARALLEL_RAY_TOL: f64 = 1e-12;

/// Candidates closer than this are treated as a tie and resolved toward the
/// lower wall index.
pub const TIE_TOL: f64 = 1e-12;

/// Depths along the zero-latitude circle, one per ray of a fan.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonDepthMap {
    values: Vec<f64>,
    fan: RayFan,
}

impl HorizonDepthMap {
    pub fn new(values: Vec<f64>, fan: RayFan) -> Result<Self> {
        if values.len() != fan.count() {
            return Err(Error::Shape {
                expected: fan.count(),
                found: values.len(),
            });
        }
        if let Some(j) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!(
                "depth {j} is {}, expected a finite positive value",
                values[j]
            )));
        }
        Ok(Self { values, fan })
    }

    /// Map on the standard equiangular fan of `values.len()` rays.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let fan = make_ray_fan(values.len())?;
        Self::new(values, fan)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fan(&self) -> &RayFan {
        &self.fan
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn median(&self) -> f64 {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayTrace {
    pub active_wall: usize,
    pub candidate_count: usize,
    pub depth: f64,
}

/// Which wall won each ray, plus a fingerprint of the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderTrace {
    pub rays: Vec<RayTrace>,
    pub(crate) fingerprint: u64,
}

impl RenderTrace {
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

fn candidate_at(ray: Vec3, theta: f64, wall: &WallPlane) -> Option<f64> {
    let denom = ray.dot(wall.normal);
    if denom.abs() < PARALLEL_RAY_TOL {
        return None;
    }
    // a vertical plane hit along a horizontal ray lies at the ray's longitude
    if !wall.covers(theta) {
        return None;
    }
    let d = -wall.offset / denom;
    (d >= 0.0).then_some(d)
}

/// Depth at which `ray` meets `wall`, if the hit is in front of the camera
/// and inside the wall's longitude span.
pub fn candidate_depth(ray: Vec3, wall: &WallPlane) -> Option<f64> {
    candidate_at(ray, longitude_of(ray), wall)
}

fn walls_fingerprint(walls: &[WallPlane], fan: &RayFan) -> u64 {
    let mut h = DefaultHasher::new();
    for w in walls {
        for v in [
            w.normal.x,
            w.normal.y,
            w.normal.z,
            w.offset,
            w.theta_span.0,
            w.theta_span.1,
        ] {
            v.to_bits().hash(&mut h);
        }
    }
    fan.count().hash(&mut h);
    h.finish()
}

/// Fingerprint of everything a pair render depends on.
pub(crate) fn pair_fingerprint(
    pair: &BoundaryPair,
    camera_height: f64,
    ceiling_ratio: f64,
    fan: &RayFan,
) -> u64 {
    let mut h = DefaultHasher::new();
    for set in [pair.floor(), pair.ceiling()] {
        for q in set.points() {
            q.theta().to_bits().hash(&mut h);
            q.phi().to_bits().hash(&mut h);
        }
    }
    camera_height.to_bits().hash(&mut h);
    ceiling_ratio.to_bits().hash(&mut h);
    fan.count().hash(&mut h);
    h.finish()
}

/// Nearest surviving wall hit for every ray of the fan.
pub fn render(walls: &[WallPlane], fan: &RayFan) -> Result<(HorizonDepthMap, RenderTrace)> {
    render_with(walls, fan, |_, out| out.extend(0..walls.len()))
}

/// Same result as [`render`] for walls from [`recover_wall_planes`]. Their
/// spans `[θ_i, θ_{i+1})` are sorted and disjoint inside `[−π, π)`, so a ray
/// can only be covered by the wall found by binary search or by the last,
/// seam-crossing wall.
fn render_loop(walls: &[WallPlane], fan: &RayFan) -> Result<(HorizonDepthMap, RenderTrace)> {
    let last = walls.len() - 1;
    let lows: Vec<f64> = walls[..last].iter().map(|w| w.theta_span.0).collect();
    render_with(walls, fan, |theta, out| {
        let k = lows.partition_point(|&lo| lo <= theta);
        if k > 0 {
            out.push(k - 1);
        }
        out.push(last);
    })
}

fn render_with(
    walls: &[WallPlane],
    fan: &RayFan,
    candidates: impl Fn(f64, &mut Vec<usize>),
) -> Result<(HorizonDepthMap, RenderTrace)> {
    let mut values = Vec::with_capacity(fan.count());
    let mut rays = Vec::with_capacity(fan.count());
    let mut idx = Vec::new();
    for (&theta, &dir) in fan.thetas().iter().zip(fan.directions()) {
        idx.clear();
        candidates(theta, &mut idx);
        let mut best: Option<(usize, f64)> = None;
        let mut count = 0;
        for &i in &idx {
            let Some(d) = candidate_at(dir, theta, &walls[i]) else {
                continue;
            };
            count += 1;
            match best {
                Some((_, b)) if d >= b - TIE_TOL => {}
                _ => best = Some((i, d)),
            }
        }
        let Some((active_wall, depth)) = best else {
            return Err(Error::OpenLayout { theta });
        };
        values.push(depth);
        rays.push(RayTrace {
            active_wall,
            candidate_count: count,
            depth,
        });
    }
    let fingerprint = walls_fingerprint(walls, fan);
    Ok((
        HorizonDepthMap::new(values, fan.clone())?,
        RenderTrace { rays, fingerprint },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTraces {
    pub floor: RenderTrace,
    pub ceiling: RenderTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRender {
    pub floor: HorizonDepthMap,
    pub ceiling: HorizonDepthMap,
    pub traces: PairTraces,
}

impl PairRender {
    /// Largest per-ray gap between the floor and ceiling renders.
    pub fn max_discrepancy(&self) -> f64 {
        self.floor
            .values()
            .iter()
            .zip(self.ceiling.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Renders floor and ceiling boundaries independently.
pub fn render_pair(
    pair: &BoundaryPair,
    camera_height: f64,
    ceiling_ratio: f64,
    fan: &RayFan,
) -> Result<PairRender> {
    let thetas = pair.thetas();
    let surface = |set| -> Result<(HorizonDepthMap, RenderTrace)> {
        let lifted = lift_to_plane(set, camera_height, ceiling_ratio)?;
        let walls = recover_wall_planes(&lifted, &thetas)?;
        render_loop(&walls, fan)
    };
    let (floor, mut floor_trace) = surface(pair.floor())?;
    let (ceiling, mut ceiling_trace) = surface(pair.ceiling())?;
    let fp = pair_fingerprint(pair, camera_height, ceiling_ratio, fan);
    floor_trace.fingerprint = fp;
    ceiling_trace.fingerprint = fp;
    Ok(PairRender {
        floor,
        ceiling,
        traces: PairTraces {
            floor: floor_trace,
            ceiling: ceiling_trace,
        },
    })
}

/// How the per-ray absolute errors are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// `‖D_f − D̄‖₁ + ‖D_c − D̄‖₁`.
    #[default]
    Sum,
    /// The sum divided by the number of rays.
    Mean,
}

impl Reduction {
    pub(crate) fn scale(self, m: usize) -> f64 {
        match self {
            Reduction::Sum => 1.0,
            Reduction::Mean => 1.0 / m as f64,
        }
    }
}

fn check_same_fan(a: &HorizonDepthMap, b: &HorizonDepthMap) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: b.len(),
            found: a.len(),
        });
    }
    Ok(())
}

pub fn l1_loss(
    floor: &HorizonDepthMap,
    ceiling: &HorizonDepthMap,
    target: &HorizonDepthMap,
) -> Result<f64> {
    l1_loss_with(floor, ceiling, target, Reduction::Sum)
}

pub fn l1_loss_with(
    floor: &HorizonDepthMap,
    ceiling: &HorizonDepthMap,
    target: &HorizonDepthMap,
    reduction: Reduction,
) -> Result<f64> {
    check_same_fan(floor, target)?;
    check_same_fan(ceiling, target)?;
    let t = target.values();
    let sum: f64 = floor
        .values()
        .iter()
        .zip(t)
        .chain(ceiling.values().iter().zip(t))
        .map(|(d, g)| (d - g).abs())
        .sum();
    Ok(sum * reduction.scale(target.len()))
}
