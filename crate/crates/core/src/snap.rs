//! Axis-snapping a dense floor boundary into a Manhattan room polygon.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{lift_to_plane, BoundaryPair, LayoutAnnotation, DEFAULT_CAMERA_HEIGHT};
use crate::polygon::Point2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnapConfig {
    pub camera_height: f64,
    /// Segments turning by more than this from a wall's axis start a new wall.
    pub corner_angle: f64,
    /// Walls shorter than this (meters) are merged away.
    pub collinear_tol: f64,
    /// Walls supported by fewer boundary segments are treated as noise.
    pub min_wall_segments: usize,
    pub histogram_bins: usize,
}

impl Default for SnapConfig {
    fn default() -> Self {
        Self {
            camera_height: DEFAULT_CAMERA_HEIGHT,
            corner_angle: FRAC_PI_4,
            collinear_tol: 0.1,
            min_wall_segments: 3,
            histogram_bins: 90,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    /// Wall runs along x, so its coordinate is z.
    AlongX,
    /// Wall runs along z, so its coordinate is x.
    AlongZ,
}

fn rotate(p: Point2, angle: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Dominant wall orientation in `[0, π/2)`: the peak of a length-weighted
/// histogram of segment directions, refined by a circular mean around it.
fn dominant_direction(points: &[Point2], bins: usize) -> f64 {
    let n = points.len();
    let segs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let a = points[k];
            let b = points[(k + 1) % n];
            let (dx, dz) = (b[0] - a[0], b[1] - a[1]);
            (dz.atan2(dx).rem_euclid(FRAC_PI_2), dx.hypot(dz))
        })
        .collect();
    let width = FRAC_PI_2 / bins as f64;
    let mut hist = vec![0.0; bins];
    for &(angle, len) in &segs {
        hist[((angle / width) as usize).min(bins - 1)] += len;
    }
    let smoothed = |b: usize| hist[(b + bins - 1) % bins] + hist[b] + hist[(b + 1) % bins];
    let peak = (0..bins)
        .max_by(|&a, &b| smoothed(a).total_cmp(&smoothed(b)))
        .unwrap_or(0);
    let center = (peak as f64 + 0.5) * width;

    // angles mod π/2 live on a circle after scaling by 4
    let (mut s, mut c) = (0.0, 0.0);
    for &(angle, len) in &segs {
        let mut diff = (angle - center).rem_euclid(FRAC_PI_2);
        if diff > FRAC_PI_4 {
            diff -= FRAC_PI_2;
        }
        if diff.abs() <= 2.5 * width {
            s += len * (4.0 * angle).sin();
            c += len * (4.0 * angle).cos();
        }
    }
    (s.atan2(c) / 4.0).rem_euclid(FRAC_PI_2)
}

fn classify(d: Point2, corner_angle: f64) -> Option<Axis> {
    let from_x = d[1].abs().atan2(d[0].abs());
    if from_x <= corner_angle && from_x < FRAC_PI_2 - corner_angle {
        Some(Axis::AlongX)
    } else if FRAC_PI_2 - from_x <= corner_angle {
        Some(Axis::AlongZ)
    } else {
        None
    }
}

/// Maximal cyclic runs of equal labels as `(label, first segment, length)`.
fn runs(labels: &[Axis]) -> Vec<(Axis, usize, usize)> {
    let n = labels.len();
    let Some(start) = (0..n).find(|&k| labels[k] != labels[(k + n - 1) % n]) else {
        return vec![(labels[0], 0, n)];
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        let first = (start + k) % n;
        let mut len = 1;
        while k + len < n && labels[(start + k + len) % n] == labels[first] {
            len += 1;
        }
        out.push((labels[first], first, len));
        k += len;
    }
    out
}

#[derive(Debug, Clone)]
struct Wall {
    axis: Axis,
    /// Boundary segments supporting the wall.
    len: usize,
    /// Weighted sum and total weight of the supporting coordinates.
    sum: f64,
    weight: f64,
}

impl Wall {
    fn coord(&self) -> f64 {
        self.sum / self.weight
    }
}

/// Range of point offsets within a run of `len` segments that support its
/// wall: segment k joins points k and k+1, so the interior points are
/// 1 ..= len-1; long runs drop one more at each end.
fn interior(len: usize) -> std::ops::Range<usize> {
    if len >= 6 {
        2..len - 1
    } else if len >= 2 {
        1..len
    } else {
        0..len + 1
    }
}

/// Rotation that best aligns the runs with the axes: minimizes the weighted
/// squared distance of each run's interior points to its own axis-parallel
/// line, in closed form.
fn axis_correction(points: &[Point2], radii: &[f64], runs: &[(Axis, usize, usize)]) -> f64 {
    let n = points.len();
    // second moments across and along the wall directions, and the cross term
    let (mut across, mut along, mut cross) = (0.0, 0.0, 0.0);
    for &(axis, first, len) in runs {
        let idx: Vec<usize> = interior(len).map(|k| (first + k) % n).collect();
        if idx.len() < 2 {
            continue;
        }
        let w: Vec<f64> = idx.iter().map(|&i| 1.0 / (radii[i] * radii[i])).collect();
        let total: f64 = w.iter().sum();
        let mx = idx
            .iter()
            .zip(&w)
            .map(|(&i, w)| w * points[i][0])
            .sum::<f64>()
            / total;
        let mz = idx
            .iter()
            .zip(&w)
            .map(|(&i, w)| w * points[i][1])
            .sum::<f64>()
            / total;
        let (mut sxx, mut szz, mut sxz) = (0.0, 0.0, 0.0);
        for (&i, w) in idx.iter().zip(&w) {
            let (dx, dz) = (points[i][0] - mx, points[i][1] - mz);
            sxx += w * dx * dx;
            szz += w * dz * dz;
            sxz += w * dx * dz;
        }
        match axis {
            Axis::AlongX => {
                across += szz;
                along += sxx;
                cross += sxz;
            }
            Axis::AlongZ => {
                across += sxx;
                along += szz;
                cross -= sxz;
            }
        }
    }
    // residual(β) = const + ((across − along)/2)·cos 2β − cross·sin 2β
    0.5 * cross.atan2(0.5 * (along - across))
}

/// Wall from the points strictly inside a run of `len` segments starting at
/// `first`. Each point is weighted by `1/r²`: latitude noise moves a floor
/// point by an amount growing with the square of its distance.
fn wall_from_run(points: &[Point2], radii: &[f64], axis: Axis, first: usize, len: usize) -> Wall {
    let n = points.len();
    let (mut sum, mut weight) = (0.0, 0.0);
    for k in interior(len) {
        let idx = (first + k) % n;
        let w = 1.0 / (radii[idx] * radii[idx]);
        let v = match axis {
            Axis::AlongX => points[idx][1],
            Axis::AlongZ => points[idx][0],
        };
        sum += w * v;
        weight += w;
    }
    Wall {
        axis,
        len,
        sum,
        weight,
    }
}

/// Removes walls until none is spurious, shortest first. A wall is spurious
/// when it is at most `collinear_tol` long (the gap between its parallel
/// neighbours), or when it has fewer than `min_segments` segments and its
/// neighbours are perpendicular, i.e. it is noise at a corner. Parallel
/// neighbours of a removed wall become one wall.
fn drop_spurious_walls(walls: &mut Vec<Wall>, min_segments: usize, collinear_tol: f64) {
    while walls.len() > 4 {
        let m = walls.len();
        let extent = |k: usize| {
            let (prev, next) = (&walls[(k + m - 1) % m], &walls[(k + 1) % m]);
            if prev.axis == next.axis {
                Some((prev.coord() - next.coord()).abs())
            } else {
                None
            }
        };
        let candidate = (0..m)
            .filter_map(|k| match extent(k) {
                Some(e) if e <= collinear_tol => Some((k, e)),
                None if walls[k].len < min_segments => Some((k, 0.0)),
                _ => None,
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((k, _)) = candidate else {
            return;
        };
        let short = walls.remove(k);
        let m = walls.len();
        let (p, q) = ((k + m - 1) % m, k % m);
        if walls[p].axis == walls[q].axis {
            let next = walls.remove(q);
            let p = if q < p { p - 1 } else { p };
            let prev = &mut walls[p];
            prev.len += short.len + next.len;
            prev.sum += next.sum;
            prev.weight += next.weight;
        } else {
            walls[p].len += short.len;
        }
    }
}

/// Replaces the lifted floor boundary by an axis-aligned polygon in the
/// boundary's dominant frame, rotated back into camera coordinates.
pub fn manhattan_snap(
    pair: &BoundaryPair,
    ratio: f64,
    cfg: &SnapConfig,
) -> Result<LayoutAnnotation> {
    let lifted = lift_to_plane(pair.floor(), cfg.camera_height, ratio)?;
    let raw: Vec<Point2> = lifted.iter().map(|p| [p.x, p.z]).collect();
    let radii: Vec<f64> = raw.iter().map(|p| p[0].hypot(p[1])).collect();
    let n = raw.len();
    if n < 4 {
        return Err(Error::SnapFailure(format!(
            "{n} boundary points cannot form a room"
        )));
    }

    let mut alpha = dominant_direction(&raw, cfg.histogram_bins.max(4));
    let mut pts: Vec<Point2> = raw.iter().map(|&p| rotate(p, -alpha)).collect();

    let classified: Vec<Option<Axis>> = (0..n)
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % n]);
            classify([b[0] - a[0], b[1] - a[1]], cfg.corner_angle)
        })
        .collect();
    let Some(seed) = classified.iter().position(Option::is_some) else {
        return Err(Error::SnapFailure(
            "no segment is close to a wall axis".into(),
        ));
    };
    // ambiguous segments continue the wall before them
    let mut labels = vec![Axis::AlongX; n];
    let mut current = classified[seed].expect("seed is classified");
    for k in 0..n {
        let idx = (seed + k) % n;
        if let Some(axis) = classified[idx] {
            current = axis;
        }
        labels[idx] = current;
    }

    let runs = runs(&labels);
    for _ in 0..3 {
        let beta = axis_correction(&pts, &radii, &runs);
        alpha += beta;
        pts = raw.iter().map(|&p| rotate(p, -alpha)).collect();
    }

    let mut walls: Vec<Wall> = runs
        .into_iter()
        .map(|(axis, first, len)| wall_from_run(&pts, &radii, axis, first, len))
        .collect();
    if walls.len() < 4 {
        return Err(Error::SnapFailure(format!(
            "detected {} walls, need at least 4",
            walls.len()
        )));
    }
    drop_spurious_walls(&mut walls, cfg.min_wall_segments, cfg.collinear_tol);

    let m = walls.len();
    if m < 4 || m % 2 == 1 {
        return Err(Error::SnapFailure(format!(
            "detected {m} walls, need an even count of at least 4"
        )));
    }
    let corners: Vec<Point2> = (0..m)
        .map(|k| {
            let (a, b) = (&walls[k], &walls[(k + 1) % m]);
            let local = match a.axis {
                Axis::AlongX => [b.coord(), a.coord()],
                Axis::AlongZ => [a.coord(), b.coord()],
            };
            rotate(local, alpha)
        })
        .collect();
    LayoutAnnotation::new(corners, cfg.camera_height, ratio)
        .map_err(|e| Error::SnapFailure(format!("snapped polygon invalid: {e}")))
}
