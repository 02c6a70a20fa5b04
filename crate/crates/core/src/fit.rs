//! Recovering boundary latitudes from a target horizon-depth map.
//!
//! Longitudes stay on a fixed grid and only latitudes move, by gradient
//! descent on the L1 horizon-depth loss with a per-iteration backtracking
//! line search.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grad::loss_gradient;
use crate::layout::{
    annotation_to_boundaries, lift_to_plane, BoundaryPair, LayoutAnnotation, Surface,
    DEFAULT_CAMERA_HEIGHT,
};
use crate::render::{l1_loss_with, render_pair, HorizonDepthMap, Reduction};
use crate::sphere::{equiangular_longitudes, make_ray_fan};

/// Latitudes are kept at least this far from the poles.
pub const POLE_MARGIN: f64 = 1e-3;

/// Latitudes are kept at least this far from the horizon.
pub const HORIZON_MARGIN: f64 = 1e-3;

/// Backtracking gives up once the trial step falls below this.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Boundary points per surface when no initial layout is given.
    pub n_points: usize,
    pub m_rays: usize,
    pub max_iters: usize,
    /// Initial trial step of every line search, in radians per unit gradient.
    pub step_size: f64,
    /// Stop once an accepted step improves the loss by less than this.
    pub convergence_tol: f64,
    /// Recorded for provenance; the descent itself is deterministic.
    pub seed: u64,
    pub camera_height: f64,
    /// Ratio used to place the ceiling plane while fitting. A horizon-depth
    /// map alone does not constrain it.
    pub ceiling_ratio: f64,
    pub mean_reduction: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_points: 256,
            m_rays: 256,
            max_iters: 2000,
            step_size: 1e-3,
            convergence_tol: 1e-9,
            seed: 0,
            camera_height: DEFAULT_CAMERA_HEIGHT,
            ceiling_ratio: 1.0,
            mean_reduction: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.step_size,
            self.convergence_tol,
            self.camera_height,
            self.ceiling_ratio,
        ];
        if self.n_points < 4 || self.m_rays < 4 || self.max_iters == 0 {
            return Err(Error::Domain(
                "fit needs n_points ≥ 4, m_rays ≥ 4 and max_iters > 0".into(),
            ));
        }
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("fit config values must be positive".into()));
        }
        Ok(())
    }

    fn reduction(&self) -> Reduction {
        if self.mean_reduction {
            Reduction::Mean
        } else {
            Reduction::Sum
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub pair: BoundaryPair,
    /// Loss before the first step and after every accepted step.
    pub loss_trajectory: Vec<f64>,
    pub ceiling_ratio: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn final_loss(&self) -> f64 {
        *self
            .loss_trajectory
            .last()
            .expect("trajectory starts non-empty")
    }
}

/// Boundary pair whose floor and ceiling points sit at the depths of `depth`
/// along its rays: the polygon through the ray hits, lifted back to angles.
pub fn boundaries_from_depth(
    depth: &HorizonDepthMap,
    camera_height: f64,
    ceiling_ratio: f64,
) -> Result<BoundaryPair> {
    let floor: Vec<f64> = depth
        .values()
        .iter()
        .map(|d| camera_height.atan2(*d))
        .collect();
    let ceiling: Vec<f64> = depth
        .values()
        .iter()
        .map(|d| -(camera_height * ceiling_ratio).atan2(*d))
        .collect();
    BoundaryPair::from_angles(depth.fan().thetas(), &floor, &ceiling)
}

/// Dense boundary pair of `n` points on the equiangular grid: where the
/// room's floor and ceiling boundaries cross each grid longitude.
pub fn sample_boundaries(a: &LayoutAnnotation, n: usize) -> Result<BoundaryPair> {
    let corners = annotation_to_boundaries(a)?;
    let fan = make_ray_fan(n)?;
    let r = render_pair(&corners, a.camera_height(), a.ceiling_ratio(), &fan)?;
    boundaries_from_depth(&r.floor, a.camera_height(), a.ceiling_ratio())
}

/// Square room centered on the camera whose median depth matches `target`.
fn default_init(target: &HorizonDepthMap, cfg: &FitConfig) -> Result<BoundaryPair> {
    // the median of 1/max(|sin θ|, |cos θ|) over a full turn is 1/cos(π/8)
    let half_side = target.median() * FRAC_PI_8.cos();
    let thetas = equiangular_longitudes(cfg.n_points);
    let depth = |t: f64| half_side / t.sin().abs().max(t.cos().abs());
    let floor: Vec<f64> = thetas
        .iter()
        .map(|&t| cfg.camera_height.atan2(depth(t)))
        .collect();
    let ceiling: Vec<f64> = thetas
        .iter()
        .map(|&t| -(cfg.camera_height * cfg.ceiling_ratio).atan2(depth(t)))
        .collect();
    BoundaryPair::from_angles(&thetas, &floor, &ceiling)
}

fn project(phi: f64, surface: Surface) -> f64 {
    let (lo, hi) = (HORIZON_MARGIN, FRAC_PI_2 - POLE_MARGIN);
    match surface {
        Surface::Floor => phi.clamp(lo, hi),
        Surface::Ceiling => phi.clamp(-hi, -lo),
    }
}

fn project_all(phis: &[f64], surface: Surface) -> Vec<f64> {
    phis.iter().map(|&p| project(p, surface)).collect()
}

/// Fits floor and ceiling latitudes so both renders match `target`.
pub fn fit_layout(
    target: &HorizonDepthMap,
    cfg: &FitConfig,
    init: Option<&BoundaryPair>,
) -> Result<FitResult> {
    cfg.validate()?;
    if target.len() != cfg.m_rays {
        return Err(Error::Shape {
            expected: cfg.m_rays,
            found: target.len(),
        });
    }
    let fan = target.fan().clone();
    let (h, ratio, reduction) = (cfg.camera_height, cfg.ceiling_ratio, cfg.reduction());
    let mut pair = match init {
        Some(p) => p.clone(),
        None => default_init(target, cfg)?,
    };

    let evaluate = |p: &BoundaryPair| -> Result<f64> {
        let r = render_pair(p, h, ratio, &fan)?;
        l1_loss_with(&r.floor, &r.ceiling, target, reduction)
    };

    let mut grad = loss_gradient(&pair, target, h, ratio, &fan, reduction)?;
    let mut loss = grad.loss;
    let mut trajectory = vec![loss];
    let mut converged = loss == 0.0;
    let mut iterations = 0;

    while !converged && iterations < cfg.max_iters {
        let floor = pair.floor().phis();
        let ceiling = pair.ceiling().phis();
        let mut step = cfg.step_size;
        let mut evaluated = false;
        let accepted = loop {
            if step < MIN_STEP {
                break None;
            }
            let f: Vec<f64> = floor
                .iter()
                .zip(&grad.floor_phi)
                .map(|(p, g)| p - step * g)
                .collect();
            let c: Vec<f64> = ceiling
                .iter()
                .zip(&grad.ceiling_phi)
                .map(|(p, g)| p - step * g)
                .collect();
            let trial = pair.with_phis(
                &project_all(&f, Surface::Floor),
                &project_all(&c, Surface::Ceiling),
            )?;
            match evaluate(&trial) {
                Ok(l) if l < loss => break Some((trial, l)),
                Ok(_) => evaluated = true,
                Err(Error::OpenLayout { .. } | Error::DegenerateWall { .. }) => {}
                Err(e) => return Err(e),
            }
            step *= 0.5;
        };
        let Some((next, next_loss)) = accepted else {
            if evaluated {
                // no step along −g lowers the loss: a kink of the L1 objective
                converged = true;
                break;
            }
            return Err(Error::FitFailure {
                reason: "every trial step broke the layout".into(),
                iterations,
                trajectory,
            });
        };
        iterations += 1;
        let improvement = loss - next_loss;
        pair = next;
        loss = next_loss;
        trajectory.push(loss);
        if improvement < cfg.convergence_tol || loss == 0.0 {
            converged = true;
        } else {
            grad = loss_gradient(&pair, target, h, ratio, &fan, reduction)?;
        }
    }

    Ok(FitResult {
        ceiling_ratio: estimate_ceiling_ratio(&pair)?,
        pair,
        loss_trajectory: trajectory,
        converged,
        iterations,
    })
}

/// Mean ratio of floor to ceiling horizontal distances after lifting both
/// surfaces to unit distance from the camera.
pub fn estimate_ceiling_ratio(pair: &BoundaryPair) -> Result<f64> {
    let floor = lift_to_plane(pair.floor(), 1.0, 1.0)?;
    let ceiling = lift_to_plane(pair.ceiling(), 1.0, 1.0)?;
    let sum: f64 = floor
        .iter()
        .zip(&ceiling)
        .map(|(f, c)| f.horizontal_norm() / c.horizontal_norm())
        .sum();
    Ok(sum / pair.len() as f64)
}
