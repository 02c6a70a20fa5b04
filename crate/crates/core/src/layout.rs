//! Boundary-point layouts, their lift onto the floor and ceiling planes, and
//! wall-plane recovery.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polygon::{self, Point2};
use crate::sphere::{cartesian_to_spherical, spherical_to_cartesian, SphericalPoint, Vec3};

/// Camera height used when an annotation does not give one, in meters.
pub const DEFAULT_CAMERA_HEIGHT: f64 = 1.6;

/// Consecutive lifted points closer than this do not define a wall.
pub const COINCIDENT_TOL: f64 = 1e-9;

/// Unit-sphere points with `|y|` below this are treated as parallel to the
/// floor/ceiling plane.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Annotations whose camera lies closer than this to a wall are rejected.
const INSIDE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Floor,
    Ceiling,
}

/// Ordered boundary points on the floor or ceiling boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPointSet {
    surface: Surface,
    points: Vec<SphericalPoint>,
}

impl BoundaryPointSet {
    pub fn new(surface: Surface, points: Vec<SphericalPoint>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Domain(format!(
                "boundary needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = (1..points.len()).find(|&i| points[i].theta() <= points[i - 1].theta()) {
            return Err(Error::Domain(format!(
                "boundary longitudes must be strictly ascending (index {i})"
            )));
        }
        let wrong_side = |q: &SphericalPoint| match surface {
            Surface::Floor => q.phi() <= 0.0,
            Surface::Ceiling => q.phi() >= 0.0,
        };
        if let Some(i) = points.iter().position(wrong_side) {
            return Err(Error::Domain(format!(
                "{surface:?} point {i} has latitude {} on the wrong side of the horizon",
                points[i].phi()
            )));
        }
        Ok(Self { surface, points })
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn points(&self) -> &[SphericalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.points.iter().map(SphericalPoint::theta).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.points.iter().map(SphericalPoint::phi).collect()
    }

    /// Copy with the same longitudes and new latitudes.
    pub fn with_phis(&self, phis: &[f64]) -> Result<Self> {
        if phis.len() != self.points.len() {
            return Err(Error::Shape {
                expected: self.points.len(),
                found: phis.len(),
            });
        }
        let points = self
            .points
            .iter()
            .zip(phis)
            .map(|(q, &phi)| q.with_phi(phi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.surface, points)
    }
}

/// Floor and ceiling boundaries sharing their longitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    floor: BoundaryPointSet,
    ceiling: BoundaryPointSet,
}

impl BoundaryPair {
    pub fn new(floor: BoundaryPointSet, ceiling: BoundaryPointSet) -> Result<Self> {
        if floor.surface != Surface::Floor || ceiling.surface != Surface::Ceiling {
            return Err(Error::Domain("boundary pair surfaces swapped".into()));
        }
        if floor.len() != ceiling.len() {
            return Err(Error::Shape {
                expected: floor.len(),
                found: ceiling.len(),
            });
        }
        if let Some(i) = floor
            .points
            .iter()
            .zip(&ceiling.points)
            .position(|(f, c)| f.theta() != c.theta())
        {
            return Err(Error::Domain(format!(
                "floor and ceiling longitudes differ at index {i}"
            )));
        }
        Ok(Self { floor, ceiling })
    }

    /// Builds a pair from shared longitudes and per-surface latitudes.
    pub fn from_angles(thetas: &[f64], floor_phis: &[f64], ceiling_phis: &[f64]) -> Result<Self> {
        let build = |surface, phis: &[f64]| -> Result<BoundaryPointSet> {
            if phis.len() != thetas.len() {
                return Err(Error::Shape {
                    expected: thetas.len(),
                    found: phis.len(),
                });
            }
            let pts = thetas
                .iter()
                .zip(phis)
                .map(|(&t, &p)| SphericalPoint::new(t, p))
                .collect::<Result<Vec<_>>>()?;
            BoundaryPointSet::new(surface, pts)
        };
        Self::new(
            build(Surface::Floor, floor_phis)?,
            build(Surface::Ceiling, ceiling_phis)?,
        )
    }

    pub fn floor(&self) -> &BoundaryPointSet {
        &self.floor
    }

    pub fn ceiling(&self) -> &BoundaryPointSet {
        &self.ceiling
    }

    pub fn len(&self) -> usize {
        self.floor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.floor.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.floor.thetas()
    }

    pub fn with_phis(&self, floor_phis: &[f64], ceiling_phis: &[f64]) -> Result<Self> {
        Self::new(
            self.floor.with_phis(floor_phis)?,
            self.ceiling.with_phis(ceiling_phis)?,
        )
    }
}

/// A vertical wall plane `normal · p + offset = 0` and the longitude arc it
/// is allowed to answer rays for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallPlane {
    pub normal: Vec3,
    pub offset: f64,
    /// Half-open arc `[lo, hi)`. `hi` may exceed `π` for the wall that
    /// crosses the seam.
    pub theta_span: (f64, f64),
}

impl WallPlane {
    /// Seam-aware membership test on the half-open span.
    pub fn covers(&self, theta: f64) -> bool {
        let (lo, hi) = self.theta_span;
        [theta, theta + TAU, theta - TAU]
            .into_iter()
            .any(|t| t >= lo && t < hi)
    }

    /// Signed residual of the plane equation at `p`.
    pub fn residual(&self, p: Vec3) -> f64 {
        self.normal.dot(p) + self.offset
    }
}

/// Ground-truth room: a floor-plan polygon around the camera.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutAnnotation {
    corners_xz: Vec<Point2>,
    camera_height: f64,
    ceiling_ratio: f64,
}

impl LayoutAnnotation {
    /// Validates and stores the room with counter-clockwise corners
    /// (positive shoelace area in `(x, z)`). Clockwise input is reversed.
    pub fn new(corners_xz: Vec<Point2>, camera_height: f64, ceiling_ratio: f64) -> Result<Self> {
        if corners_xz.len() < 4 {
            return Err(Error::Domain(format!(
                "a room needs at least 4 corners, got {}",
                corners_xz.len()
            )));
        }
        if !(camera_height > 0.0 && camera_height.is_finite()) {
            return Err(Error::Domain(format!(
                "camera height {camera_height} must be positive"
            )));
        }
        if !(ceiling_ratio > 0.0 && ceiling_ratio.is_finite()) {
            return Err(Error::Domain(format!(
                "ceiling ratio {ceiling_ratio} must be positive"
            )));
        }
        if !polygon::is_simple(&corners_xz) {
            return Err(Error::Geometry("room polygon is not simple".into()));
        }
        let mut corners = corners_xz;
        if polygon::signed_area(&corners) < 0.0 {
            corners.reverse();
        }
        if !polygon::contains(&corners, [0.0, 0.0])
            || polygon::boundary_distance(&corners, [0.0, 0.0]) <= INSIDE_MARGIN
        {
            return Err(Error::Geometry(
                "camera is not strictly inside the room".into(),
            ));
        }
        Ok(Self {
            corners_xz: corners,
            camera_height,
            ceiling_ratio,
        })
    }

    pub fn corners_xz(&self) -> &[Point2] {
        &self.corners_xz
    }

    pub fn camera_height(&self) -> f64 {
        self.camera_height
    }

    pub fn ceiling_ratio(&self) -> f64 {
        self.ceiling_ratio
    }

    /// Floor-to-ceiling height.
    pub fn room_height(&self) -> f64 {
        self.camera_height * (1.0 + self.ceiling_ratio)
    }

    pub fn corner_count(&self) -> usize {
        self.corners_xz.len()
    }

    /// Same room with the camera moved to `(x, z)`.
    pub fn translated(&self, dx: f64, dz: f64) -> Result<Self> {
        Self::new(
            self.corners_xz
                .iter()
                .map(|c| [c[0] + dx, c[1] + dz])
                .collect(),
            self.camera_height,
            self.ceiling_ratio,
        )
    }
}

fn lift_one(q: SphericalPoint, index: usize, target_y: f64) -> Result<Vec3> {
    let unit = spherical_to_cartesian(q);
    if unit.y.abs() < PARALLEL_TOL {
        return Err(Error::DegenerateLatitude { index });
    }
    Ok(unit * (target_y / unit.y))
}

/// Scales each unit-sphere boundary direction onto its plane: floor points to
/// `y = camera_height`, ceiling points to `y = -camera_height · ceiling_ratio`.
pub fn lift_to_plane(
    points: &BoundaryPointSet,
    camera_height: f64,
    ceiling_ratio: f64,
) -> Result<Vec<Vec3>> {
    // written to also reject NaN
    if !(camera_height > 0.0 && ceiling_ratio > 0.0) {
        return Err(Error::Domain(
            "camera height and ceiling ratio must be positive".into(),
        ));
    }
    let target_y = match points.surface {
        Surface::Floor => camera_height,
        Surface::Ceiling => -camera_height * ceiling_ratio,
    };
    points
        .points
        .iter()
        .enumerate()
        .map(|(i, &q)| lift_one(q, i, target_y))
        .collect()
}

/// One vertical plane per pair of consecutive lifted points, closing the loop
/// with a wall from the last point back to the first across the `±π` seam.
pub fn recover_wall_planes(lifted: &[Vec3], thetas: &[f64]) -> Result<Vec<WallPlane>> {
    let n = lifted.len();
    if n < 3 {
        return Err(Error::Domain(format!("need at least 3 points, got {n}")));
    }
    if thetas.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: thetas.len(),
        });
    }
    if let Some(i) = (1..n).find(|&i| thetas[i] <= thetas[i - 1]) {
        return Err(Error::Domain(format!(
            "longitudes must be strictly ascending (index {i})"
        )));
    }
    (0..n)
        .map(|i| {
            let next = (i + 1) % n;
            let (a, b) = (lifted[i], lifted[next]);
            let edge = b - a;
            if edge.norm() < COINCIDENT_TOL {
                return Err(Error::DegenerateWall { index: i });
            }
            let normal = Vec3::Y_HAT.cross(edge);
            let hi = if next == 0 {
                thetas[0] + TAU
            } else {
                thetas[next]
            };
            Ok(WallPlane {
                normal,
                offset: -normal.dot(a),
                theta_span: (thetas[i], hi),
            })
        })
        .collect()
}

/// Signed angular step from `a` to `b`, wrapped into `(-π, π]`.
fn wrapped_step(a: f64, b: f64) -> f64 {
    let mut d = b - a;
    while d <= -PI {
        d += TAU;
    }
    while d > PI {
        d -= TAU;
    }
    d
}

/// Boundary points at each annotated corner, ordered by ascending longitude.
///
/// Every corner must be visible from the camera: a room whose outline folds
/// back in longitude cannot be expressed as an ascending boundary.
pub fn annotation_to_boundaries(a: &LayoutAnnotation) -> Result<BoundaryPair> {
    let h = a.camera_height;
    let ceiling_y = -h * a.ceiling_ratio;

    // Counter-clockwise in (x, z) runs clockwise in longitude.
    let thetas: Vec<f64> = a.corners_xz.iter().map(|c| c[0].atan2(c[1])).collect();
    let n = thetas.len();
    let mut winding = 0.0;
    for i in 0..n {
        let step = wrapped_step(thetas[i], thetas[(i + 1) % n]);
        if step >= 0.0 {
            return Err(Error::Geometry(format!(
                "corner {} is hidden from the camera",
                (i + 1) % n
            )));
        }
        winding += step;
    }
    if (winding + TAU).abs() > 1e-6 {
        return Err(Error::Geometry(
            "room outline does not wind once around the camera".into(),
        ));
    }

    let mut rows = Vec::with_capacity(n);
    for c in &a.corners_xz {
        let f = cartesian_to_spherical(Vec3::new(c[0], h, c[1]))?;
        let ceil = cartesian_to_spherical(Vec3::new(c[0], ceiling_y, c[1]))?;
        rows.push((f.theta(), f.phi(), ceil.phi()));
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0));
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Degenerate("two corners share a longitude".into()));
    }
    let thetas: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let floor: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ceiling: Vec<f64> = rows.iter().map(|r| r.2).collect();
    BoundaryPair::from_angles(&thetas, &floor, &ceiling)
}

/// Per-wall deviation from the nearer of the x and z axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManhattanReport {
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn validate_manhattan(a: &LayoutAnnotation, tol: f64) -> ManhattanReport {
    let c = &a.corners_xz;
    let n = c.len();
    let deviations: Vec<f64> = (0..n)
        .map(|i| {
            let d = [c[(i + 1) % n][0] - c[i][0], c[(i + 1) % n][1] - c[i][1]];
            let angle = d[1].atan2(d[0]).rem_euclid(FRAC_PI_2);
            angle.min(FRAC_PI_2 - angle)
        })
        .collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    ManhattanReport {
        pass: max_deviation <= tol,
        deviations,
        max_deviation,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn square_room(r: f64) -> LayoutAnnotation {
        LayoutAnnotation::new(
            vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            1.6,
            r,
        )
        .unwrap()
    }

    fn l_room() -> LayoutAnnotation {
        LayoutAnnotation::new(
            vec![
                [-1.0, -1.0],
                [3.0, -1.0],
                [3.0, 1.0],
                [1.0, 1.0],
                [1.0, 3.0],
                [-1.0, 3.0],
            ],
            1.6,
            1.0,
        )
        .unwrap()
    }

    fn close(a: Vec3, b: Vec3) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn lift_examples() {
        let floor = BoundaryPointSet::new(
            Surface::Floor,
            vec![
                cartesian_to_spherical(Vec3::new(0.6, 0.8, 0.0)).unwrap(),
                SphericalPoint::new(2.0, 0.3).unwrap(),
                SphericalPoint::new(3.0, 0.3).unwrap(),
            ],
        )
        .unwrap();
        let lifted = lift_to_plane(&floor, 1.6, 1.0).unwrap();
        assert!(close(lifted[0], Vec3::new(1.2, 1.6, 0.0)));

        let ceiling = BoundaryPointSet::new(
            Surface::Ceiling,
            vec![
                cartesian_to_spherical(Vec3::new(0.0, -0.8, 0.6)).unwrap(),
                SphericalPoint::new(1.0, -0.3).unwrap(),
                SphericalPoint::new(2.0, -0.3).unwrap(),
            ],
        )
        .unwrap();
        let lifted = lift_to_plane(&ceiling, 1.6, 1.0).unwrap();
        assert!(close(lifted[0], Vec3::new(0.0, -1.6, 1.2)));

        let diag = BoundaryPointSet::new(
            Surface::Floor,
            vec![
                SphericalPoint::new(0.0, FRAC_PI_4).unwrap(),
                SphericalPoint::new(1.0, 0.3).unwrap(),
                SphericalPoint::new(2.0, 0.3).unwrap(),
            ],
        )
        .unwrap();
        let lifted = lift_to_plane(&diag, 1.6, 1.0).unwrap();
        assert!(close(lifted[0], Vec3::new(0.0, 1.6, 1.6)));
    }

    #[test]
    fn lift_rejects_grazing_latitude() {
        let floor = BoundaryPointSet::new(
            Surface::Floor,
            vec![
                SphericalPoint::new(0.0, 1e-12).unwrap(),
                SphericalPoint::new(1.0, 0.3).unwrap(),
                SphericalPoint::new(2.0, 0.3).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            lift_to_plane(&floor, 1.6, 1.0),
            Err(Error::DegenerateLatitude { index: 0 })
        ));
    }

    #[test]
    fn boundary_invariants() {
        let p = |t, f| SphericalPoint::new(t, f).unwrap();
        assert!(BoundaryPointSet::new(Surface::Floor, vec![p(0.0, 0.3), p(1.0, 0.3)]).is_err());
        assert!(
            BoundaryPointSet::new(Surface::Floor, vec![p(0.0, 0.3), p(0.0, 0.3), p(1.0, 0.3)])
                .is_err()
        );
        assert!(BoundaryPointSet::new(
            Surface::Ceiling,
            vec![p(0.0, 0.3), p(1.0, -0.3), p(2.0, -0.3)]
        )
        .is_err());
        let f = BoundaryPointSet::new(Surface::Floor, vec![p(0.0, 0.3), p(1.0, 0.3), p(2.0, 0.3)])
            .unwrap();
        let c = BoundaryPointSet::new(
            Surface::Ceiling,
            vec![p(0.0, -0.3), p(1.5, -0.3), p(2.0, -0.3)],
        )
        .unwrap();
        assert!(BoundaryPair::new(f, c).is_err());
    }

    #[test]
    fn two_point_wall() {
        let walls = recover_wall_planes(
            &[
                Vec3::new(1.0, 1.6, 1.0),
                Vec3::new(-1.0, 1.6, 1.0),
                Vec3::new(0.0, 1.6, -1.0),
            ],
            &[0.5, 2.0, 3.0],
        )
        .unwrap();
        assert_eq!(walls[0].normal, Vec3::new(0.0, 0.0, 2.0));
        assert_eq!(walls[0].offset, -2.0);
        assert_eq!(walls[2].theta_span, (3.0, 0.5 + TAU));
    }

    #[test]
    fn unit_square_planes() {
        let pair = annotation_to_boundaries(&square_room(1.0)).unwrap();
        let lifted = lift_to_plane(pair.floor(), 1.6, 1.0).unwrap();
        let walls = recover_wall_planes(&lifted, &pair.thetas()).unwrap();
        assert_eq!(walls.len(), 4);
        for (i, w) in walls.iter().enumerate() {
            let n = w.normal;
            assert_eq!(n.y, 0.0);
            let axis_aligned = n.x.abs() < 1e-12 || n.z.abs() < 1e-12;
            assert!(axis_aligned, "{n:?}");
            assert!((w.offset.abs() / n.norm() - 1.0).abs() < 1e-12);
            assert!(w.residual(lifted[i]).abs() < 1e-9);
            assert!(w.residual(lifted[(i + 1) % 4]).abs() < 1e-9);
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let p = Vec3::new(1.0, 1.6, 1.0);
        assert!(matches!(
            recover_wall_planes(&[p, p, Vec3::new(-1.0, 1.6, 0.0)], &[0.1, 0.2, 0.3]),
            Err(Error::DegenerateWall { index: 0 })
        ));
    }

    #[test]
    fn square_boundaries() {
        let pair = annotation_to_boundaries(&square_room(1.0)).unwrap();
        let expect_phi = (1.6 / 2f64.sqrt()).atan();
        let expect_theta = [-3.0 * FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4, 3.0 * FRAC_PI_4];
        for (i, q) in pair.floor().points().iter().enumerate() {
            assert!((q.phi() - expect_phi).abs() < 1e-15);
            assert!((q.theta() - expect_theta[i]).abs() < 1e-15);
        }
        for (f, c) in pair.floor().points().iter().zip(pair.ceiling().points()) {
            assert_eq!(c.phi(), -f.phi());
        }
        let lifted = lift_to_plane(pair.floor(), 1.6, 1.0).unwrap();
        for p in lifted {
            assert!((p.x.abs() - 1.0).abs() < 1e-9 && (p.z.abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn l_room_boundaries() {
        let a = l_room();
        let pair = annotation_to_boundaries(&a).unwrap();
        assert_eq!(pair.len(), 6);
        assert!(pair.thetas().windows(2).all(|w| w[0] < w[1]));
        let lifted = lift_to_plane(pair.floor(), 1.6, 1.0).unwrap();
        for c in a.corners_xz() {
            assert!(lifted
                .iter()
                .any(|p| (p.x - c[0]).abs() < 1e-9 && (p.z - c[1]).abs() < 1e-9));
        }
        let ceiling = lift_to_plane(pair.ceiling(), 1.6, 1.0).unwrap();
        for (f, c) in lifted.iter().zip(&ceiling) {
            assert!((f.x - c.x).abs() < 1e-9 && (f.z - c.z).abs() < 1e-9);
        }
    }

    #[test]
    fn clockwise_input_reoriented() {
        let cw = LayoutAnnotation::new(
            vec![[-1.0, 1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]],
            1.6,
            1.0,
        )
        .unwrap();
        assert!(polygon::signed_area(cw.corners_xz()) > 0.0);
    }

    #[test]
    fn annotation_errors() {
        let outside = LayoutAnnotation::new(
            vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]],
            1.6,
            1.0,
        );
        assert!(matches!(outside, Err(Error::Geometry(_))));
        let bowtie = LayoutAnnotation::new(
            vec![[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0]],
            1.6,
            1.0,
        );
        assert!(matches!(bowtie, Err(Error::Geometry(_))));
        assert!(
            LayoutAnnotation::new(vec![[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]], 1.6, 1.0).is_err()
        );
        assert!(matches!(
            LayoutAnnotation::new(square_room(1.0).corners_xz().to_vec(), -1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hidden_corner_rejected() {
        // U-shaped room: the notch hides corners from any camera position
        let u = LayoutAnnotation::new(
            vec![
                [-1.5, -1.0],
                [1.5, -1.0],
                [1.5, 1.0],
                [0.5, 1.0],
                [0.5, 0.0],
                [-0.5, 0.0],
                [-0.5, 1.0],
                [-1.5, 1.0],
            ]
            .into_iter()
            .map(|c| [c[0], c[1] + 0.5])
            .collect(),
            1.6,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            annotation_to_boundaries(&u),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn collinear_corners_share_longitude() {
        let a = LayoutAnnotation::new(
            vec![
                [-1.0, -1.0],
                [1.0, -1.0],
                [1.0, 0.0],
                [2.0, 0.0],
                [2.0, 1.0],
                [-1.0, 1.0],
            ],
            1.6,
            1.0,
        );
        // camera on the extension of the edge (1,0)-(2,0)
        assert!(matches!(
            annotation_to_boundaries(&a.unwrap()),
            Err(Error::Geometry(_)) | Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn manhattan_report() {
        let r = validate_manhattan(&square_room(1.0), PI / 36.0);
        assert!(r.pass && r.max_deviation == 0.0);
        let (s, c) = (10f64.to_radians()).sin_cos();
        let rotated = LayoutAnnotation::new(
            square_room(1.0)
                .corners_xz()
                .iter()
                .map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
                .collect(),
            1.6,
            1.0,
        )
        .unwrap();
        let r = validate_manhattan(&rotated, PI / 36.0);
        assert!(!r.pass);
        assert!((r.max_deviation - 10f64.to_radians()).abs() < 1e-12);
        assert!(validate_manhattan(&l_room(), PI / 36.0).pass);
    }

    fn scaled(a: &LayoutAnnotation, s: f64) -> LayoutAnnotation {
        LayoutAnnotation::new(
            a.corners_xz()
                .iter()
                .map(|c| [c[0] * s, c[1] * s])
                .collect(),
            a.camera_height() * s,
            a.ceiling_ratio(),
        )
        .unwrap()
    }

    #[test]
    fn exact_scaling_keeps_angles_bit_identical() {
        // every coordinate and the camera height scale exactly by 0.5 and 3
        let a = LayoutAnnotation::new(
            vec![
                [-1.5, -1.25],
                [2.5, -1.25],
                [2.5, 0.75],
                [0.5, 0.75],
                [0.5, 2.0],
                [-1.5, 2.0],
            ],
            1.5,
            1.0,
        )
        .unwrap();
        let base = annotation_to_boundaries(&a).unwrap();
        for s in [0.5, 3.0] {
            assert_eq!(
                base,
                annotation_to_boundaries(&scaled(&a, s)).unwrap(),
                "s = {s}"
            );
        }
        let halved = annotation_to_boundaries(&scaled(&l_room(), 0.5)).unwrap();
        assert_eq!(annotation_to_boundaries(&l_room()).unwrap(), halved);
    }

    #[test]
    fn inexact_scaling_moves_angles_by_rounding_only() {
        // 3 · 1.6 is not representable, so the scaled room differs from the
        // exact scaling by one rounding of each input
        assert_ne!(1.6 * 3.0 / 3.0, 1.6);
        let base = annotation_to_boundaries(&l_room()).unwrap();
        let tripled = annotation_to_boundaries(&scaled(&l_room(), 3.0)).unwrap();
        assert_eq!(base.thetas(), tripled.thetas());
        for (a, b) in base.floor().phis().iter().zip(tripled.floor().phis()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON, "{a} vs {b}");
        }
    }
}
