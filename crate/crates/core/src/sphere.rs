//! Spherical, Cartesian and equirectangular-pixel coordinate frames.
//!
//! The Cartesian frame has its y-axis perpendicular to the ground and pointing
//! toward the floor, so points below the horizon have positive latitude.
//! Longitude is measured from +z toward +x.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A direction on the panorama sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    theta: f64,
    phi: f64,
}

impl SphericalPoint {
    /// Builds a point, rejecting coordinates outside `[-π, π] × [-π/2, π/2]`.
    ///
    /// `θ = +π` is stored as `-π` so the seam has a single representative.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite spherical coordinate ({theta}, {phi})"
            )));
        }
        if !(-PI..=PI).contains(&theta) {
            return Err(Error::Domain(format!("longitude {theta} outside [-π, π]")));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&phi) {
            return Err(Error::Domain(format!("latitude {phi} outside [-π/2, π/2]")));
        }
        Ok(Self {
            theta: canonical_longitude(theta),
            phi,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same longitude, new latitude.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::new(self.theta, phi)
    }
}

fn canonical_longitude(theta: f64) -> f64 {
    if theta == PI {
        -PI
    } else {
        theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    /// Unit vector along the y-axis (toward the floor).
    pub const Y_HAT: Vec3 = Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Length of the projection onto the horizontal (x, z) plane.
    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Maps a sphere direction to the unit vector `(cos φ sin θ, sin φ, cos φ cos θ)`.
pub fn spherical_to_cartesian(q: SphericalPoint) -> Vec3 {
    let (sin_t, cos_t) = q.theta.sin_cos();
    let (sin_p, cos_p) = q.phi.sin_cos();
    Vec3::new(cos_p * sin_t, sin_p, cos_p * cos_t)
}

/// Direction of `p` as longitude/latitude. Poles report `θ = 0`.
pub fn cartesian_to_spherical(p: Vec3) -> Result<SphericalPoint> {
    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
        return Err(Error::Domain("non-finite vector".into()));
    }
    let m = p.x.abs().max(p.y.abs()).max(p.z.abs());
    if m == 0.0 {
        return Err(Error::Domain("zero vector has no direction".into()));
    }
    // dividing by the largest component first makes the angles of `s·p`
    // bit-identical to those of `p` whenever `s·p` is exact
    let (x, y, z) = (p.x / m, p.y / m, p.z / m);
    let horizontal = x.hypot(z);
    let theta = if horizontal == 0.0 { 0.0 } else { x.atan2(z) };
    let phi = y.atan2(horizontal);
    SphericalPoint::new(theta, phi)
}

/// Longitude of a horizontal ray, canonicalised to `[-π, π)`.
pub(crate) fn longitude_of(v: Vec3) -> f64 {
    canonical_longitude(v.x.atan2(v.z))
}

fn check_aspect(width: f64, height: f64) -> Result<()> {
    if !(width > 0.0 && height > 0.0) || width != 2.0 * height {
        return Err(Error::Format(format!(
            "equirectangular image must be 2:1, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Pixel-center convention: pixel `(x, y)` covers `[x, x+1) × [y, y+1)` and
/// maps through its center. Row 0 is the top of the image, which this
/// function reports as latitude `+π/2`.
pub fn pixel_to_spherical(x: f64, y: f64, width: f64, height: f64) -> Result<SphericalPoint> {
    check_aspect(width, height)?;
    if !(0.0..width).contains(&x) || !(0.0..height).contains(&y) {
        return Err(Error::Domain(format!(
            "pixel ({x}, {y}) outside {width}x{height} image"
        )));
    }
    let mut theta = (2.0 * (x + 0.5) / width - 1.0) * PI;
    if theta >= PI {
        // right half of the last column wraps across the seam
        theta -= TAU;
    }
    // the lower half of the last row lies past the pole
    let phi = ((0.5 - (y + 0.5) / height) * PI).max(-FRAC_PI_2);
    SphericalPoint::new(theta, phi)
}

/// Inverse of [`pixel_to_spherical`].
pub fn spherical_to_pixel(q: SphericalPoint, width: f64, height: f64) -> Result<(f64, f64)> {
    check_aspect(width, height)?;
    let x = (q.theta / PI + 1.0) * width / 2.0 - 0.5;
    let y = (0.5 - q.phi / PI) * height - 0.5;
    Ok((x, y))
}

/// `count` equiangular longitudes starting at `-π`: `θ_j = -π + 2πj/count`.
///
/// Grids whose sizes differ by a power of two share their common longitudes
/// bit for bit.
pub fn equiangular_longitudes(count: usize) -> Vec<f64> {
    let m = count as f64;
    (0..count).map(|j| -PI + TAU * j as f64 / m).collect()
}

/// Horizontal fan of unit rays at equiangular longitudes and zero latitude.
#[derive(Debug, Clone, PartialEq)]
pub struct RayFan {
    thetas: Vec<f64>,
    directions: Vec<Vec3>,
}

impl RayFan {
    pub fn count(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Angular spacing between adjacent rays.
    pub fn step(&self) -> f64 {
        TAU / self.count() as f64
    }
}

pub fn make_ray_fan(m: usize) -> Result<RayFan> {
    if m < 4 {
        return Err(Error::Domain(format!(
            "ray fan needs at least 4 rays, got {m}"
        )));
    }
    let thetas = equiangular_longitudes(m);
    let directions = thetas
        .iter()
        .map(|&t| {
            let (s, c) = t.sin_cos();
            Vec3::new(s, 0.0, c)
        })
        .collect();
    Ok(RayFan { thetas, directions })
}
