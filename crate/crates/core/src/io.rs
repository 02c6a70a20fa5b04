//! JSON and CSV file formats for annotations, boundary pairs and depth maps.
//!
//! Floats are written with 17 significant digits so every `f64` survives a
//! write/read cycle unchanged.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::layout::{BoundaryPair, BoundaryPointSet, LayoutAnnotation, Surface};
use crate::render::HorizonDepthMap;
use crate::sphere::{pixel_to_spherical, SphericalPoint};

/// Pretty JSON formatter that prints every float as `{:.16e}`.
pub struct ExactFloatFormatter(PrettyFormatter<'static>);

impl Default for ExactFloatFormatter {
    fn default() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with exact floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter::default());
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

fn default_camera_height() -> f64 {
    crate::layout::DEFAULT_CAMERA_HEIGHT
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners_xz: Option<Vec<[f64; 2]>>,
    /// Floor-corner pixels of an equirectangular panorama.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners_pixels: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_height: Option<f64>,
    #[serde(default = "default_camera_height")]
    pub camera_height: f64,
    pub ceiling_ratio: f64,
}

impl From<&LayoutAnnotation> for AnnotationFile {
    fn from(a: &LayoutAnnotation) -> Self {
        Self {
            corners_xz: Some(a.corners_xz().to_vec()),
            corners_pixels: None,
            image_width: None,
            image_height: None,
            camera_height: a.camera_height(),
            ceiling_ratio: a.ceiling_ratio(),
        }
    }
}

impl AnnotationFile {
    pub fn to_annotation(&self) -> Result<LayoutAnnotation> {
        let corners = match (&self.corners_xz, &self.corners_pixels) {
            (Some(xz), None) => xz.clone(),
            (None, Some(px)) => {
                let (Some(w), Some(h)) = (self.image_width, self.image_height) else {
                    return Err(Error::Format(
                        "corners_pixels needs image_width and image_height".into(),
                    ));
                };
                pixel_corners(px, w, h, self.camera_height)?
            }
            _ => {
                return Err(Error::Format(
                    "annotation needs exactly one of corners_xz and corners_pixels".into(),
                ))
            }
        };
        LayoutAnnotation::new(corners, self.camera_height, self.ceiling_ratio)
    }
}

/// Floor positions of corner pixels. Image rows grow downward while the
/// latitude formula grows upward, so floor pixels below the horizon come out
/// with negative latitude and are flipped into the floor-facing frame.
fn pixel_corners(pixels: &[[f64; 2]], w: f64, h: f64, camera_height: f64) -> Result<Vec<[f64; 2]>> {
    let points = pixels
        .iter()
        .map(|&[x, y]| {
            let q = pixel_to_spherical(x, y, w, h)?;
            if q.phi() >= 0.0 {
                return Err(Error::Domain(format!(
                    "corner pixel ({x}, {y}) is not below the horizon"
                )));
            }
            SphericalPoint::new(q.theta(), -q.phi())
        })
        .collect::<Result<Vec<_>>>()?;
    points
        .into_iter()
        .map(|p| lift_single(p, camera_height))
        .collect()
}

fn lift_single(p: SphericalPoint, camera_height: f64) -> Result<[f64; 2]> {
    let v = crate::sphere::spherical_to_cartesian(p);
    if v.y.abs() < crate::layout::PARALLEL_TOL {
        return Err(Error::DegenerateLatitude { index: 0 });
    }
    let s = camera_height / v.y;
    Ok([v.x * s, v.z * s])
}

pub fn parse_annotation(text: &str) -> Result<LayoutAnnotation> {
    parse::<AnnotationFile>(text, "annotation")?.to_annotation()
}

pub fn annotation_json(a: &LayoutAnnotation) -> String {
    to_json(&AnnotationFile::from(a))
}

/// Boundary pair as `[θ, φ]` rows per surface, with the camera model used
/// to render it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryFile {
    pub floor: Vec<[f64; 2]>,
    pub ceiling: Vec<[f64; 2]>,
    #[serde(default = "default_camera_height")]
    pub camera_height: f64,
    #[serde(default = "one")]
    pub ceiling_ratio: f64,
}

fn one() -> f64 {
    1.0
}

impl BoundaryFile {
    pub fn new(pair: &BoundaryPair, camera_height: f64, ceiling_ratio: f64) -> Self {
        let rows = |s: &BoundaryPointSet| s.points().iter().map(|q| [q.theta(), q.phi()]).collect();
        Self {
            floor: rows(pair.floor()),
            ceiling: rows(pair.ceiling()),
            camera_height,
            ceiling_ratio,
        }
    }

    pub fn to_pair(&self) -> Result<BoundaryPair> {
        let set = |rows: &[[f64; 2]], surface| {
            let pts = rows
                .iter()
                .map(|&[t, p]| SphericalPoint::new(t, p))
                .collect::<Result<Vec<_>>>()?;
            BoundaryPointSet::new(surface, pts)
        };
        BoundaryPair::new(
            set(&self.floor, Surface::Floor)?,
            set(&self.ceiling, Surface::Ceiling)?,
        )
    }
}

pub fn parse_boundary(text: &str) -> Result<(BoundaryPair, f64, f64)> {
    let f: BoundaryFile = parse(text, "boundary pair")?;
    if !(f.camera_height > 0.0 && f.ceiling_ratio > 0.0) {
        return Err(Error::Domain(
            "camera_height and ceiling_ratio must be positive".into(),
        ));
    }
    Ok((f.to_pair()?, f.camera_height, f.ceiling_ratio))
}

#[derive(Debug, Deserialize)]
struct DepthFile {
    m: usize,
    values: Vec<f64>,
}

/// Reads `{"m": M, "values": [...]}`; other keys are ignored.
pub fn parse_depth_json(text: &str) -> Result<HorizonDepthMap> {
    let f: DepthFile = parse(text, "depth map")?;
    if f.values.len() != f.m {
        return Err(Error::Shape {
            expected: f.m,
            found: f.values.len(),
        });
    }
    HorizonDepthMap::from_values(f.values)
}

/// One value per line; blank lines are skipped.
pub fn parse_depth_csv(text: &str) -> Result<HorizonDepthMap> {
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Format(format!("depth csv line {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    HorizonDepthMap::from_values(values)
}

pub fn depth_csv(map: &HorizonDepthMap) -> String {
    map.values().iter().map(|v| format!("{v:.16e}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{annotation_to_boundaries, lift_to_plane};

    #[test]
    fn floats_round_trip_exactly() {
        let values = vec![0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 123456.789];
        let text = to_json(&values);
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, values);
    }

    #[test]
    fn annotation_round_trip() {
        let a = LayoutAnnotation::new(
            vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            1.6,
            0.8,
        )
        .unwrap();
        assert_eq!(parse_annotation(&annotation_json(&a)).unwrap(), a);
        let defaulted = parse_annotation(
            r#"{"corners_xz": [[-1,-1],[1,-1],[1,1],[-1,1]], "ceiling_ratio": 1}"#,
        )
        .unwrap();
        assert_eq!(defaulted.camera_height(), 1.6);
    }

    #[test]
    fn annotation_errors() {
        assert!(matches!(parse_annotation("{"), Err(Error::Format(_))));
        assert!(matches!(
            parse_annotation(r#"{"ceiling_ratio": 1}"#),
            Err(Error::Format(_))
        ));
        // camera outside the polygon
        let outside = r#"{"corners_xz": [[1,1],[2,1],[2,2],[1,2]], "ceiling_ratio": 1}"#;
        assert!(matches!(parse_annotation(outside), Err(Error::Geometry(_))));
    }

    #[test]
    fn pixel_corners_match_metric_corners() {
        // floor corners of the 2 m square seen by a 1024×512 panorama
        let a = LayoutAnnotation::new(
            vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            1.6,
            1.0,
        )
        .unwrap();
        let pair = annotation_to_boundaries(&a).unwrap();
        let pixels: Vec<[f64; 2]> = pair
            .floor()
            .points()
            .iter()
            .map(|q| {
                let up = SphericalPoint::new(q.theta(), -q.phi()).unwrap();
                let (x, y) = crate::sphere::spherical_to_pixel(up, 1024.0, 512.0).unwrap();
                [x, y]
            })
            .collect();
        let file = AnnotationFile {
            corners_xz: None,
            corners_pixels: Some(pixels),
            image_width: Some(1024.0),
            image_height: Some(512.0),
            camera_height: 1.6,
            ceiling_ratio: 1.0,
        };
        let b = file.to_annotation().unwrap();
        let lifted = lift_to_plane(pair.floor(), 1.6, 1.0).unwrap();
        assert_eq!(b.corner_count(), 4);
        for l in &lifted {
            assert!(b
                .corners_xz()
                .iter()
                .any(|c| (c[0] - l.x).abs() < 1e-9 && (c[1] - l.z).abs() < 1e-9));
        }
    }

    #[test]
    fn depth_formats() {
        let m = parse_depth_json(r#"{"m": 4, "values": [1, 2, 3, 4], "note": "x"}"#).unwrap();
        assert_eq!(m.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_depth_csv(&depth_csv(&m)).unwrap(), m);
        assert!(matches!(
            parse_depth_json(r#"{"m": 5, "values": [1, 2, 3, 4]}"#),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(
            parse_depth_csv("1\n2\nx\n"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn boundary_round_trip() {
        let a = LayoutAnnotation::new(
            vec![[-1.0, -1.0], [2.0, -1.0], [2.0, 1.0], [-1.0, 1.0]],
            1.6,
            1.3,
        )
        .unwrap();
        let pair = annotation_to_boundaries(&a).unwrap();
        let text = to_json(&BoundaryFile::new(&pair, 1.6, 1.3));
        let (back, h, r) = parse_boundary(&text).unwrap();
        assert_eq!((back, h, r), (pair, 1.6, 1.3));
    }
}
