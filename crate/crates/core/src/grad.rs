//! Analytic derivatives of rendered depth with respect to boundary angles.
//!
//! The active wall of each ray is held fixed, which gives the subgradient of
//! the occlusion min on its active branch. Both generating points of that wall
//! live in the horizontal plane of their surface, so the derivative reduces to
//! a 2-D computation in `(x, z)`:
//!
//! ```text
//! d = (n · A) / (n · u),   n = ŷ × (B − A)
//!   = (B_z A_x − B_x A_z) / ((B_z − A_z) u_x − (B_x − A_x) u_z)
//! ```
//!
//! with `A = r(φ_i) (sin θ_i, cos θ_i)`, where `r = h cot φ` on the floor and
//! `r = −hR cot φ` on the ceiling.

use crate::error::{Error, Result};
use crate::layout::{BoundaryPair, BoundaryPointSet, Surface};
use crate::render::{
    pair_fingerprint, render_pair, HorizonDepthMap, PairTraces, Reduction, RenderTrace,
};
use crate::sphere::RayFan;

/// Sparse `M × 2N` matrix: columns `0..N` are `∂d_j/∂φ_i`, columns `N..2N`
/// are `∂d_j/∂θ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthJacobian {
    points: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl DepthJacobian {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        2 * self.points
    }

    pub fn phi_col(&self, i: usize) -> usize {
        i
    }

    pub fn theta_col(&self, i: usize) -> usize {
        self.points + i
    }

    /// Nonzero entries of row `j` as `(column, value)`.
    pub fn row(&self, j: usize) -> &[(usize, f64)] {
        &self.rows[j]
    }

    pub fn get(&self, j: usize, col: usize) -> f64 {
        self.rows[j]
            .iter()
            .find(|(c, _)| *c == col)
            .map_or(0.0, |(_, v)| *v)
    }

    /// `vᵀ J`, the contraction used by the loss gradient.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (row, &w) in self.rows.iter().zip(v) {
            if w == 0.0 {
                continue;
            }
            for &(c, val) in row {
                out[c] += w * val;
            }
        }
        out
    }
}

struct Corner {
    pos: [f64; 2],
    d_phi: [f64; 2],
    d_theta: [f64; 2],
}

fn corners(set: &BoundaryPointSet, camera_height: f64, ceiling_ratio: f64) -> Result<Vec<Corner>> {
    let plane = match set.surface() {
        Surface::Floor => camera_height,
        Surface::Ceiling => -camera_height * ceiling_ratio,
    };
    set.points()
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let (sp, cp) = q.phi().sin_cos();
            if sp.abs() < crate::layout::PARALLEL_TOL {
                return Err(Error::DegenerateLatitude { index: i });
            }
            let (st, ct) = q.theta().sin_cos();
            let r = plane * cp / sp;
            let dr = -plane / (sp * sp);
            Ok(Corner {
                pos: [r * st, r * ct],
                d_phi: [dr * st, dr * ct],
                d_theta: [r * ct, -r * st],
            })
        })
        .collect()
}

fn surface_jacobian(
    set: &BoundaryPointSet,
    camera_height: f64,
    ceiling_ratio: f64,
    fan: &RayFan,
    trace: &RenderTrace,
) -> Result<DepthJacobian> {
    let n = set.len();
    let pts = corners(set, camera_height, ceiling_ratio)?;
    let mut rows = Vec::with_capacity(fan.count());
    for (dir, ray) in fan.directions().iter().zip(&trace.rays) {
        let i = ray.active_wall;
        let k = (i + 1) % n;
        let (a, b) = (pts[i].pos, pts[k].pos);
        let u = [dir.x, dir.z];
        let num = b[1] * a[0] - b[0] * a[1];
        let den = (b[1] - a[1]) * u[0] - (b[0] - a[0]) * u[1];
        let d = num / den;
        // ∂d/∂(A_x, A_z) and ∂d/∂(B_x, B_z)
        let grad_a = [(b[1] - d * u[1]) / den, (-b[0] + d * u[0]) / den];
        let grad_b = [(-a[1] + d * u[1]) / den, (a[0] - d * u[0]) / den];
        let dot = |g: [f64; 2], v: [f64; 2]| g[0] * v[0] + g[1] * v[1];
        rows.push(vec![
            (i, dot(grad_a, pts[i].d_phi)),
            (k, dot(grad_b, pts[k].d_phi)),
            (n + i, dot(grad_a, pts[i].d_theta)),
            (n + k, dot(grad_b, pts[k].d_theta)),
        ]);
    }
    Ok(DepthJacobian { points: n, rows })
}

/// Floor and ceiling depth Jacobians for the branch recorded in `traces`.
pub fn render_jacobian(
    pair: &BoundaryPair,
    camera_height: f64,
    ceiling_ratio: f64,
    fan: &RayFan,
    traces: &PairTraces,
) -> Result<(DepthJacobian, DepthJacobian)> {
    let fp = pair_fingerprint(pair, camera_height, ceiling_ratio, fan);
    if traces.floor.fingerprint != fp
        || traces.ceiling.fingerprint != fp
        || traces.floor.rays.len() != fan.count()
    {
        return Err(Error::StaleTrace);
    }
    Ok((
        surface_jacobian(
            pair.floor(),
            camera_height,
            ceiling_ratio,
            fan,
            &traces.floor,
        )?,
        surface_jacobian(
            pair.ceiling(),
            camera_height,
            ceiling_ratio,
            fan,
            &traces.ceiling,
        )?,
    ))
}

/// Value and gradient of the L1 horizon-depth loss.
///
/// `theta` holds derivatives with respect to the longitudes shared by the
/// floor and ceiling boundary points, so it sums both surfaces' terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub loss: f64,
    pub floor_phi: Vec<f64>,
    pub ceiling_phi: Vec<f64>,
    pub theta: Vec<f64>,
}

fn residual_signs(rendered: &HorizonDepthMap, target: &HorizonDepthMap, scale: f64) -> Vec<f64> {
    rendered
        .values()
        .iter()
        .zip(target.values())
        .map(|(d, g)| {
            if d > g {
                scale
            } else if d < g {
                -scale
            } else {
                0.0
            }
        })
        .collect()
}

pub fn loss_gradient(
    pair: &BoundaryPair,
    target: &HorizonDepthMap,
    camera_height: f64,
    ceiling_ratio: f64,
    fan: &RayFan,
    reduction: Reduction,
) -> Result<LossGradient> {
    if target.len() != fan.count() {
        return Err(Error::Shape {
            expected: fan.count(),
            found: target.len(),
        });
    }
    let rendered = render_pair(pair, camera_height, ceiling_ratio, fan)?;
    let loss = crate::render::l1_loss_with(&rendered.floor, &rendered.ceiling, target, reduction)?;
    let (jf, jc) = render_jacobian(pair, camera_height, ceiling_ratio, fan, &rendered.traces)?;
    let scale = reduction.scale(fan.count());
    let gf = jf.transpose_mul(&residual_signs(&rendered.floor, target, scale));
    let gc = jc.transpose_mul(&residual_signs(&rendered.ceiling, target, scale));
    let n = pair.len();
    Ok(LossGradient {
        loss,
        floor_phi: gf[..n].to_vec(),
        ceiling_phi: gc[..n].to_vec(),
        theta: gf[n..].iter().zip(&gc[n..]).map(|(a, b)| a + b).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{annotation_to_boundaries, LayoutAnnotation};
    use crate::sphere::make_ray_fan;

    fn square_pair() -> BoundaryPair {
        let a = LayoutAnnotation::new(
            vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            1.6,
            1.0,
        )
        .unwrap();
        annotation_to_boundaries(&a).unwrap()
    }

    fn render_floor(pair: &BoundaryPair, fan: &RayFan) -> Vec<f64> {
        render_pair(pair, 1.6, 1.0, fan)
            .unwrap()
            .floor
            .values()
            .to_vec()
    }

    #[test]
    fn square_row_is_sparse_and_negative() {
        let pair = square_pair();
        let fan = make_ray_fan(8).unwrap();
        let r = render_pair(&pair, 1.6, 1.0, &fan).unwrap();
        let (jf, _) = render_jacobian(&pair, 1.6, 1.0, &fan, &r.traces).unwrap();
        // ray θ = 0 (index 4) hits the wall between corners at ±π/4 (indices 1, 2)
        let wall = r.traces.floor.rays[4].active_wall;
        assert_eq!(wall, 1);
        assert_eq!(jf.get(4, jf.phi_col(0)), 0.0);
        assert_eq!(jf.get(4, jf.phi_col(3)), 0.0);
        assert!(jf.get(4, jf.phi_col(1)) < 0.0);
        assert!(jf.get(4, jf.phi_col(2)) < 0.0);

        // finite differences on the generating corners
        let phis = pair.floor().phis();
        for i in [1, 2] {
            let mut up = phis.clone();
            let mut down = phis.clone();
            up[i] += 1e-6;
            down[i] -= 1e-6;
            let ceil = pair.ceiling().phis();
            let fd = (render_floor(&pair.with_phis(&up, &ceil).unwrap(), &fan)[4]
                - render_floor(&pair.with_phis(&down, &ceil).unwrap(), &fan)[4])
                / 2e-6;
            let an = jf.get(4, jf.phi_col(i));
            assert!((fd - an).abs() <= 1e-4 * an.abs(), "{fd} vs {an}");
        }
    }

    #[test]
    fn stale_trace_rejected() {
        let pair = square_pair();
        let fan = make_ray_fan(16).unwrap();
        let r = render_pair(&pair, 1.6, 1.0, &fan).unwrap();
        assert!(matches!(
            render_jacobian(&pair, 1.6, 1.2, &fan, &r.traces),
            Err(Error::StaleTrace)
        ));
        let other = make_ray_fan(32).unwrap();
        assert!(matches!(
            render_jacobian(&pair, 1.6, 1.0, &other, &r.traces),
            Err(Error::StaleTrace)
        ));
    }

    #[test]
    fn zero_gradient_at_target() {
        let pair = square_pair();
        let fan = make_ray_fan(64).unwrap();
        let target = render_pair(&pair, 1.6, 1.0, &fan).unwrap().floor;
        let g = loss_gradient(&pair, &target, 1.6, 1.0, &fan, Reduction::Sum).unwrap();
        assert_eq!(g.loss, 0.0);
        assert!(g
            .floor_phi
            .iter()
            .chain(&g.ceiling_phi)
            .chain(&g.theta)
            .all(|v| *v == 0.0));
    }

    #[test]
    fn inflated_room_gradient_has_one_sign() {
        // rendered room larger than the target everywhere: lowering depth means
        // raising floor latitudes, so every floor entry is negative
        let pair = square_pair();
        let fan = make_ray_fan(64).unwrap();
        let small = LayoutAnnotation::new(
            vec![[-0.8, -0.8], [0.8, -0.8], [0.8, 0.8], [-0.8, 0.8]],
            1.6,
            1.0,
        )
        .unwrap();
        let target = render_pair(&annotation_to_boundaries(&small).unwrap(), 1.6, 1.0, &fan)
            .unwrap()
            .floor;
        let g = loss_gradient(&pair, &target, 1.6, 1.0, &fan, Reduction::Sum).unwrap();
        assert!(g.floor_phi.iter().all(|v| *v < 0.0), "{:?}", g.floor_phi);
        // ceiling latitudes are negative; moving them toward zero deepens the
        // ceiling render, so the inflated room wants them more negative
        assert!(
            g.ceiling_phi.iter().all(|v| *v > 0.0),
            "{:?}",
            g.ceiling_phi
        );
    }
}
