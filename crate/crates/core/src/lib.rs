//! Layout-to-depth geometry for 360° room panoramas.
//!
//! A room layout is described by the longitudes and latitudes of its
//! floor and ceiling boundary points. [`render_pair`] lifts those points onto
//! the floor and ceiling planes, recovers one vertical plane per wall and
//! casts an equiangular fan of horizontal rays to produce a horizon-depth
//! map. [`render_jacobian`] and [`loss_gradient`] give exact derivatives of
//! that map, [`fit_layout`] inverts it by gradient descent and
//! [`layout_iou`] scores the result.
//!
//! ```
//! use hdk_core::{annotation_to_boundaries, make_ray_fan, render_pair, LayoutAnnotation};
//!
//! let room = LayoutAnnotation::new(
//!     vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
//!     1.6,
//!     1.0,
//! )?;
//! let pair = annotation_to_boundaries(&room)?;
//! let depth = render_pair(&pair, 1.6, 1.0, &make_ray_fan(8)?)?;
//! assert!((depth.floor.values()[4] - 1.0).abs() < 1e-12); // straight ahead
//! # Ok::<(), hdk_core::Error>(())
//! ```

pub mod error;
pub mod eval;
pub mod fit;
pub mod grad;
pub mod io;
pub mod layout;
pub mod polygon;
pub mod render;
pub mod snap;
pub mod sphere;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use eval::{
    approximation_error, bucket_by_corners, layout_iou, reference_depth, ApproximationError,
    CornerBucket, IoUReport, IoUTable,
};
pub use fit::{
    boundaries_from_depth, estimate_ceiling_ratio, fit_layout, sample_boundaries, FitConfig,
    FitResult,
};
pub use grad::{loss_gradient, render_jacobian, DepthJacobian, LossGradient};
pub use layout::{
    annotation_to_boundaries, lift_to_plane, recover_wall_planes, validate_manhattan, BoundaryPair,
    BoundaryPointSet, LayoutAnnotation, ManhattanReport, Surface, WallPlane, DEFAULT_CAMERA_HEIGHT,
};
pub use polygon::Point2;
pub use render::{
    candidate_depth, l1_loss, l1_loss_with, render, render_pair, HorizonDepthMap, PairRender,
    PairTraces, Reduction, RenderTrace,
};
pub use snap::{manhattan_snap, SnapConfig};
pub use sphere::{
    cartesian_to_spherical, make_ray_fan, pixel_to_spherical, spherical_to_cartesian,
    spherical_to_pixel, RayFan, SphericalPoint, Vec3,
};
