//! Parametrized hypersurfaces (curves in the plane, surfaces in space)
//! with anisotropic frames and quadrature.

pub mod shapes;
mod spec;
pub mod spline;

pub use spec::{SurfaceConfig, SurfaceSpec};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::geom::{cross2, rot_cw, Mat3, Vec3};
use crate::quadrature::CompositeRule;
use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default number of 16-point panels per parameter direction.
pub const DEFAULT_PANELS: usize = 32;
/// Tolerance for endpoint matching and boundary membership.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub start: f64,
    pub end: f64,
    pub periodic: bool,
}

impl ParamRange {
    pub fn new(start: f64, end: f64, periodic: bool) -> Self {
        ParamRange {
            start,
            end,
            periodic,
        }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn normalized(&self, u: f64) -> f64 {
        (u - self.start) / self.len()
    }
}

/// Parameter box of a hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDomain {
    /// One range per intrinsic dimension.
    pub ranges: Vec<ParamRange>,
    pub closed: bool,
    /// Which sides of the box are boundary of the hypersurface, ordered
    /// `[u start, u end, v start, v end]`.
    pub boundary_sides: [bool; 4],
}

/// Position with first and second parameter derivatives. Unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub point: Vec3,
    pub du: [Vec3; 2],
    /// `[uu, uv, vv]`
    pub d2: [Vec3; 3],
}

impl Jet {
    pub fn zero() -> Self {
        Jet {
            point: Vec3::zeros(),
            du: [Vec3::zeros(); 2],
            d2: [Vec3::zeros(); 3],
        }
    }
}

pub trait Parametrization: Send + Sync + std::fmt::Debug {
    fn ambient_dim(&self) -> usize;
    fn domain(&self) -> ParamDomain;
    fn jet(&self, u: [f64; 2]) -> Jet;
    /// Points of reduced smoothness in the first parameter; quadrature
    /// panels are aligned with them.
    fn breakpoints(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Quadrature node in parameter space with its parameter-measure weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub u: [f64; 2],
    pub weight: f64,
}

/// Quadrature node on the boundary of a surface, or an endpoint of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub u: [f64; 2],
    /// Weight in the parameter along the boundary side (1 for curve endpoints).
    pub weight: f64,
    /// Index into [`ParamDomain::boundary_sides`].
    pub side: usize,
}

/// Local Euclidean and anisotropic geometry at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub n: usize,
    pub point: Vec3,
    pub normal: Vec3,
    pub tangents: [Vec3; 2],
    pub metric_inv: Matrix2<f64>,
    pub area_element: f64,
    /// Shape operator `B = -dN` as an ambient matrix supported on the tangent space.
    pub shape: Mat3,
    pub euclidean_mean_curvature: f64,
    /// `φ_K = h_K(N)`
    pub phi: f64,
    /// `N_K = π_K(N)`
    pub aniso_normal: Vec3,
    /// `Q = D²h_K(N)`
    pub q: Mat3,
    /// `B_K = Q ∘ B`
    pub aniso_shape: Mat3,
    /// `H_K = tr(B_K) / n`
    pub mean_curvature: f64,
    /// `tr(B_K²) - n H_K²`
    pub trace_gap: f64,
}

impl Frame {
    /// Surface gradient from parameter derivatives `df = [f_u, f_v]`.
    pub fn surface_gradient(&self, df: [f64; 2]) -> Vec3 {
        let c = self.metric_inv * nalgebra::Vector2::new(df[0], df[1]);
        self.tangents[0] * c[0] + self.tangents[1] * c[1]
    }

    /// Anisotropic gradient `∇^K f = Q(∇_Σ f)`.
    pub fn anisotropic_gradient(&self, df: [f64; 2]) -> Vec3 {
        self.q * self.surface_gradient(df)
    }

    /// `∇_Σ φ_K = -B(N_K^⊤)`.
    pub fn phi_gradient(&self) -> Vec3 {
        let tangential = self.aniso_normal - self.normal * self.phi;
        -(self.shape * tangential)
    }

    /// `tr(B_K²)`
    pub fn aniso_shape_sq_trace(&self) -> f64 {
        (self.aniso_shape * self.aniso_shape).trace()
    }
}

/// Geometry at a boundary point. `conormal` points into the hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFrame {
    pub point: Vec3,
    pub normal: Vec3,
    pub conormal: Vec3,
    pub phi: f64,
    pub aniso_normal: Vec3,
    /// `ν_K = φ_K ν - ⟨N_K, ν⟩ N`
    pub aniso_conormal: Vec3,
    /// Length element along the boundary per unit parameter (1 for curves).
    pub line_element: f64,
}

/// Summary of `H_K` over the quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureStats {
    /// Area-weighted mean.
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub sup_deviation: f64,
    pub sup_trace_gap: f64,
}

/// Per-node record for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub u: f64,
    pub v: f64,
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub phi: f64,
    pub mean_curvature: f64,
    pub trace_gap: f64,
}

/// An oriented, parametrized hypersurface.
#[derive(Clone, Debug)]
pub struct Hypersurface {
    param: Arc<dyn Parametrization>,
    orientation: f64,
    panels: [usize; 2],
    config: Option<SurfaceConfig>,
}

impl Hypersurface {
    pub fn new<P: Parametrization + 'static>(param: P) -> Self {
        Self::from_arc(Arc::new(param))
    }

    pub fn from_arc(param: Arc<dyn Parametrization>) -> Self {
        Hypersurface {
            param,
            orientation: 1.0,
            panels: [DEFAULT_PANELS; 2],
            config: None,
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = [panels.max(1); 2];
        self
    }

    pub fn with_panels2(mut self, panels: [usize; 2]) -> Self {
        self.panels = [panels[0].max(1), panels[1].max(1)];
        self
    }

    pub fn panels(&self) -> [usize; 2] {
        self.panels
    }

    /// Reverse the normal.
    pub fn flipped(mut self) -> Self {
        self.orientation = -self.orientation;
        if let Some(c) = &mut self.config {
            c.flip_normal = !c.flip_normal;
        }
        self
    }

    pub(crate) fn with_config(mut self, config: SurfaceConfig) -> Self {
        self.config = Some(config);
        self
    }

    pub fn config(&self) -> Option<&SurfaceConfig> {
        self.config.as_ref()
    }

    /// `+1` when the normal follows the parametrization's natural
    /// orientation (outward for counterclockwise curves), `-1` otherwise.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn param(&self) -> &Arc<dyn Parametrization> {
        &self.param
    }

    pub fn domain(&self) -> ParamDomain {
        self.param.domain()
    }

    pub fn n(&self) -> usize {
        self.param.domain().ranges.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.param.ambient_dim()
    }

    pub fn is_closed(&self) -> bool {
        self.param.domain().closed
    }

    pub fn jet(&self, u: [f64; 2]) -> Jet {
        self.param.jet(u)
    }

    pub fn point(&self, u: [f64; 2]) -> Vec3 {
        self.param.jet(u).point
    }

    fn rule(&self, dir: usize) -> CompositeRule {
        let d = self.domain();
        let r = d.ranges[dir];
        if dir == 0 {
            if let Some(bp) = self.param.breakpoints() {
                let pieces = bp.len().saturating_sub(1).max(1);
                let per = self.panels[0].div_ceil(pieces).max(1);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for w in bp.windows(2) {
                    let c = CompositeRule::new(w[0], w[1], per);
                    points.extend(c.points);
                    weights.extend(c.weights);
                }
                return CompositeRule { points, weights };
            }
        }
        CompositeRule::new(r.start, r.end, self.panels[dir])
    }

    /// Tensor-product quadrature nodes in parameter space.
    pub fn nodes(&self) -> Vec<Node> {
        let r0 = self.rule(0);
        if self.n() == 1 {
            return r0
                .points
                .iter()
                .zip(&r0.weights)
                .map(|(u, w)| Node {
                    u: [*u, 0.0],
                    weight: *w,
                })
                .collect();
        }
        let r1 = self.rule(1);
        let mut out = Vec::with_capacity(r0.points.len() * r1.points.len());
        for (u, wu) in r0.points.iter().zip(&r0.weights) {
            for (v, wv) in r1.points.iter().zip(&r1.weights) {
                out.push(Node {
                    u: [*u, *v],
                    weight: wu * wv,
                });
            }
        }
        out
    }

    /// Unit normal and area element from first derivatives.
    pub fn normal_from_jet(&self, jet: &Jet, u: [f64; 2]) -> Result<(Vec3, f64)> {
        let (n, da) = if self.n() == 1 {
            let t = jet.du[0];
            let len = t.norm();
            (rot_cw(&t) / len, len)
        } else {
            let c = jet.du[0].cross(&jet.du[1]);
            let len = c.norm();
            (c / len, len)
        };
        if !(da > 1e-14) || !da.is_finite() {
            return Err(Error::DegenerateMetric(u[0], u[1]));
        }
        Ok((n * self.orientation, da))
    }

    /// Full frame at a parameter point.
    pub fn frame(&self, body: &ConvexBody, u: [f64; 2]) -> Result<Frame> {
        let jet = self.param.jet(u);
        self.frame_from_jet(body, &jet, u)
    }

    pub fn frame_from_jet(&self, body: &ConvexBody, jet: &Jet, u: [f64; 2]) -> Result<Frame> {
        let n = self.n();
        if body.dim() != self.ambient_dim() {
            return Err(Error::InvalidArgument(format!(
                "body dimension {} does not match ambient dimension {}",
                body.dim(),
                self.ambient_dim()
            )));
        }
        let (normal, area_element) = self.normal_from_jet(jet, u)?;
        let (metric_inv, shape) = if n == 1 {
            let p1 = jet.du[0];
            let g = p1.dot(&p1);
            let l = jet.d2[0].dot(&normal);
            let mut mi = Matrix2::zeros();
            mi[(0, 0)] = 1.0 / g;
            (mi, p1 * p1.transpose() * (l / (g * g)))
        } else {
            let (pu, pv) = (jet.du[0], jet.du[1]);
            let g = Matrix2::new(pu.dot(&pu), pu.dot(&pv), pv.dot(&pu), pv.dot(&pv));
            let gi = g.try_inverse().ok_or(Error::DegenerateMetric(u[0], u[1]))?;
            let l = Matrix2::new(
                jet.d2[0].dot(&normal),
                jet.d2[1].dot(&normal),
                jet.d2[1].dot(&normal),
                jet.d2[2].dot(&normal),
            );
            let c = gi * l * gi;
            let mut b = Mat3::zeros();
            let p = [pu, pv];
            for i in 0..2 {
                for j in 0..2 {
                    b += p[i] * p[j].transpose() * c[(i, j)];
                }
            }
            (gi, b)
        };
        let q = body.hessian(&normal);
        let aniso_shape = q * shape;
        let nf = n as f64;
        let hk = aniso_shape.trace() / nf;
        let trace_gap = (aniso_shape * aniso_shape).trace() - nf * hk * hk;
        Ok(Frame {
            n,
            point: jet.point,
            normal,
            tangents: jet.du,
            metric_inv,
            area_element,
            euclidean_mean_curvature: shape.trace() / nf,
            shape,
            phi: body.h(&normal),
            aniso_normal: body.grad(&normal),
            q,
            aniso_shape,
            mean_curvature: hk,
            trace_gap,
        })
    }

    /// Frames at every quadrature node, computed in parallel.
    pub fn frames(&self, body: &ConvexBody) -> Result<Vec<(Node, Frame)>> {
        self.nodes()
            .into_par_iter()
            .map(|nd| self.frame(body, nd.u).map(|f| (nd, f)))
            .collect()
    }

    /// Euclidean area (length for curves).
    pub fn area(&self) -> Result<f64> {
        let mut s = 0.0;
        for nd in self.nodes() {
            let jet = self.param.jet(nd.u);
            s += self.normal_from_jet(&jet, nd.u)?.1 * nd.weight;
        }
        Ok(s)
    }

    /// `A_K(Σ) = ∫ h_K(N) dA`.
    pub fn anisotropic_area(&self, body: &ConvexBody) -> Result<f64> {
        let mut s = 0.0;
        for nd in self.nodes() {
            let jet = self.param.jet(nd.u);
            let (nrm, da) = self.normal_from_jet(&jet, nd.u)?;
            s += body.h(&nrm) * da * nd.weight;
        }
        Ok(s)
    }

    /// `∫ ⟨p, N⟩ dA`.
    pub fn flux(&self) -> Result<f64> {
        let mut s = 0.0;
        for nd in self.nodes() {
            let jet = self.param.jet(nd.u);
            let (nrm, da) = self.normal_from_jet(&jet, nd.u)?;
            s += jet.point.dot(&nrm) * da * nd.weight;
        }
        Ok(s)
    }

    /// Planar shoelace integral `½ ∫ p × p' du` in traversal direction.
    pub fn shoelace(&self) -> f64 {
        self.nodes()
            .iter()
            .map(|nd| {
                let j = self.param.jet(nd.u);
                0.5 * cross2(&j.point, &j.du[0]) * nd.weight
            })
            .sum()
    }

    /// Start and end points of a curve.
    pub fn endpoints(&self) -> Option<(Vec3, Vec3)> {
        if self.n() != 1 {
            return None;
        }
        let r = self.domain().ranges[0];
        Some((self.point([r.start, 0.0]), self.point([r.end, 0.0])))
    }

    /// Volume enclosed by a closed hypersurface with outward normal, or
    /// by a planar curve together with closing curves. The closing curves
    /// continue the traversal from the end of this curve back to its start.
    pub fn enclosed_volume(&self, closure: &[Hypersurface]) -> Result<f64> {
        let n1 = (self.n() + 1) as f64;
        if self.is_closed() {
            return Ok(self.flux()? / n1);
        }
        if self.n() != 1 || closure.is_empty() {
            let gap = self
                .endpoints()
                .map(|(a, b)| (a - b).norm())
                .unwrap_or(f64::INFINITY);
            return Err(Error::NotClosed(gap));
        }
        let (start, mut cur) = self.endpoints().unwrap();
        let mut total = self.shoelace();
        for c in closure {
            let (a, b) = c.endpoints().ok_or(Error::NotClosed(f64::INFINITY))?;
            let gap = (a - cur).norm();
            if gap > BOUNDARY_TOL {
                return Err(Error::NotClosed(gap));
            }
            total += c.shoelace();
            cur = b;
        }
        let gap = (cur - start).norm();
        if gap > BOUNDARY_TOL {
            return Err(Error::NotClosed(gap));
        }
        Ok(self.orientation * total)
    }

    /// Statistics of `H_K` and of the trace gap over the quadrature nodes.
    pub fn curvature_stats(&self, body: &ConvexBody) -> Result<CurvatureStats> {
        let frames = self.frames(body)?;
        let mut area = 0.0;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut gap = 0.0f64;
        for (nd, f) in &frames {
            let w = nd.weight * f.area_element;
            area += w;
            sum += w * f.mean_curvature;
            min = min.min(f.mean_curvature);
            max = max.max(f.mean_curvature);
            gap = gap.max(f.trace_gap.abs());
        }
        let mean = sum / area;
        let var: f64 = frames
            .iter()
            .map(|(nd, f)| nd.weight * f.area_element * (f.mean_curvature - mean).powi(2))
            .sum::<f64>()
            / area;
        Ok(CurvatureStats {
            mean,
            min,
            max,
            std_dev: var.sqrt(),
            sup_deviation: (max - mean).max(mean - min),
            sup_trace_gap: gap,
        })
    }

    /// Per-node export records.
    pub fn samples(&self, body: &ConvexBody) -> Result<Vec<SurfaceSample>> {
        Ok(self
            .frames(body)?
            .into_iter()
            .map(|(nd, f)| SurfaceSample {
                u: nd.u[0],
                v: nd.u[1],
                point: [f.point.x, f.point.y, f.point.z],
                normal: [f.normal.x, f.normal.y, f.normal.z],
                phi: f.phi,
                mean_curvature: f.mean_curvature,
                trace_gap: f.trace_gap,
            })
            .collect())
    }

    /// Boundary quadrature nodes; empty for closed hypersurfaces.
    pub fn boundary_nodes(&self) -> Vec<BoundaryNode> {
        let d = self.domain();
        let mut out = Vec::new();
        if self.n() == 1 {
            let r = d.ranges[0];
            if d.boundary_sides[0] {
                out.push(BoundaryNode {
                    u: [r.start, 0.0],
                    weight: 1.0,
                    side: 0,
                });
            }
            if d.boundary_sides[1] {
                out.push(BoundaryNode {
                    u: [r.end, 0.0],
                    weight: 1.0,
                    side: 1,
                });
            }
            return out;
        }
        for side in 0..4 {
            if !d.boundary_sides[side] {
                continue;
            }
            let fixed_dir = side / 2;
            let along = 1 - fixed_dir;
            let fr = d.ranges[fixed_dir];
            let fixed = if side % 2 == 0 { fr.start } else { fr.end };
            let rule = self.rule(along);
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let mut u = [0.0; 2];
                u[fixed_dir] = fixed;
                u[along] = *x;
                out.push(BoundaryNode {
                    u,
                    weight: *w,
                    side,
                });
            }
        }
        out
    }

    /// Boundary frame with inward conormal.
    pub fn boundary_frame(&self, body: &ConvexBody, node: &BoundaryNode) -> Result<BoundaryFrame> {
        let jet = self.param.jet(node.u);
        let (normal, _) = self.normal_from_jet(&jet, node.u)?;
        let sign = if node.side % 2 == 0 { 1.0 } else { -1.0 };
        let (conormal, line_element) = if self.n() == 1 {
            (jet.du[0].normalize() * sign, 1.0)
        } else {
            let fixed_dir = node.side / 2;
            let along = 1 - fixed_dir;
            let t = jet.du[along];
            let len = t.norm();
            let tau = t / len;
            let d = jet.du[fixed_dir];
            let c = d - tau * tau.dot(&d) - normal * normal.dot(&d);
            (c.normalize() * sign, len)
        };
        let phi = body.h(&normal);
        let nk = body.grad(&normal);
        Ok(BoundaryFrame {
            point: jet.point,
            normal,
            conormal,
            phi,
            aniso_normal: nk,
            aniso_conormal: conormal * phi - normal * nk.dot(&conormal),
            line_element,
        })
    }
}
