//! 2-D and 3-D layout IoU and per-corner-count aggregation.
//!
//! Rooms are compared as vertical prisms standing on a shared floor plane:
//! the floor polygon extruded by `camera_height · (1 + ceiling_ratio)`.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::Result;
use crate::fit::boundaries_from_depth;
use crate::layout::{annotation_to_boundaries, LayoutAnnotation};
use crate::polygon;
use crate::render::{render_pair, HorizonDepthMap};
use crate::sphere::make_ray_fan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CornerBucket {
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "6")]
    Six,
    #[serde(rename = "8")]
    Eight,
    #[serde(rename = "10+")]
    TenPlus,
}

impl CornerBucket {
    pub const ALL: [CornerBucket; 4] = [Self::Four, Self::Six, Self::Eight, Self::TenPlus];

    /// Odd counts fall into the next even bucket.
    pub fn for_corners(n: usize) -> Self {
        match n {
            0..=4 => Self::Four,
            5..=6 => Self::Six,
            7..=8 => Self::Eight,
            _ => Self::TenPlus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Four => "4",
            Self::Six => "6",
            Self::Eight => "8",
            Self::TenPlus => "10+",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IoUReport {
    pub iou_2d: f64,
    pub iou_3d: f64,
    /// Corner count of the ground-truth room.
    pub corners: usize,
    pub bucket: CornerBucket,
}

pub fn layout_iou(pred: &LayoutAnnotation, gt: &LayoutAnnotation) -> Result<IoUReport> {
    let inter = polygon::intersection_area(pred.corners_xz(), gt.corners_xz())?;
    let (ap, ag) = (
        polygon::area(pred.corners_xz()),
        polygon::area(gt.corners_xz()),
    );
    let (hp, hg) = (pred.room_height(), gt.room_height());
    let iou_2d = (inter / (ap + ag - inter)).clamp(0.0, 1.0);
    let vol_inter = inter * hp.min(hg);
    let iou_3d = (vol_inter / (ap * hp + ag * hg - vol_inter)).clamp(0.0, 1.0);
    Ok(IoUReport {
        iou_2d,
        iou_3d,
        corners: gt.corner_count(),
        bucket: CornerBucket::for_corners(gt.corner_count()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketRow {
    /// Corner bucket label, or `"overall"`.
    pub label: String,
    pub count: usize,
    /// `None` when the bucket is empty.
    pub iou_2d: Option<f64>,
    pub iou_3d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IoUTable {
    pub overall: BucketRow,
    pub buckets: Vec<BucketRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn row<'a>(label: &str, reports: impl Iterator<Item = &'a IoUReport> + Clone) -> BucketRow {
    BucketRow {
        label: label.to_string(),
        count: reports.clone().count(),
        iou_2d: mean(reports.clone().map(|r| r.iou_2d)),
        iou_3d: mean(reports.map(|r| r.iou_3d)),
    }
}

/// Mean IoU overall and per ground-truth corner bucket.
pub fn bucket_by_corners(reports: &[IoUReport]) -> IoUTable {
    let buckets = CornerBucket::ALL
        .iter()
        .map(|&b| row(b.label(), reports.iter().filter(move |r| r.bucket == b)))
        .collect();
    IoUTable {
        overall: row("overall", reports.iter()),
        buckets,
    }
}

impl fmt::Display for IoUTable {
    /// Aligned text table, IoU in percent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct =
            |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.2}", 100.0 * x));
        let mut header = format!("{:<8}", "metric");
        let mut two = format!("{:<8}", "2D IoU");
        let mut three = format!("{:<8}", "3D IoU");
        let mut count = format!("{:<8}", "rooms");
        for r in std::iter::once(&self.overall).chain(&self.buckets) {
            let _ = write!(header, " {:>8}", r.label);
            let _ = write!(two, " {:>8}", pct(r.iou_2d));
            let _ = write!(three, " {:>8}", pct(r.iou_3d));
            let _ = write!(count, " {:>8}", r.count);
        }
        writeln!(f, "{header}")?;
        writeln!(f, "{two}")?;
        writeln!(f, "{three}")?;
        writeln!(f, "{count}")
    }
}

/// Error of an `m`-ray horizon-depth map against a dense reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximationError {
    pub m: usize,
    pub max: f64,
    pub mean: f64,
}

/// Floor render of `a` at `m` rays.
pub fn reference_depth(a: &LayoutAnnotation, m: usize) -> Result<HorizonDepthMap> {
    let pair = annotation_to_boundaries(a)?;
    Ok(render_pair(
        &pair,
        a.camera_height(),
        a.ceiling_ratio(),
        &make_ray_fan(m)?,
    )?
    .floor)
}

/// Treats the `m`-ray map of `a` as the polygon through its ray hits, renders
/// that polygon on the reference fan and compares it with `reference`.
pub fn approximation_error(
    a: &LayoutAnnotation,
    m: usize,
    reference: &HorizonDepthMap,
) -> Result<ApproximationError> {
    let (h, r) = (a.camera_height(), a.ceiling_ratio());
    let coarse = reference_depth(a, m)?;
    let polygon = boundaries_from_depth(&coarse, h, r)?;
    let fine = render_pair(&polygon, h, r, reference.fan())?.floor;
    let errors = fine
        .values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b).abs());
    let (max, sum) = errors.fold((0.0f64, 0.0), |(m, s), e| (m.max(e), s + e));
    Ok(ApproximationError {
        m,
        max,
        mean: sum / reference.len() as f64,
    })
}
