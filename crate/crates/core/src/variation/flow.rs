//! One-parameter deformations `Σ_t` of a hypersurface along `X = ω N_K`.

use super::omega::Omega;
use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{cross2, polar, rot_ccw, rot_cw, Vec3};
use crate::surface::{Hypersurface, Jet, ParamDomain, Parametrization};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// How points move along the velocity field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    /// `p_t = p + t X(p)`.
    #[default]
    StraightLine,
    /// Straight lines in a chart that flattens a curved wall near the
    /// boundary, so boundary points stay on `∂Ω`. Flat walls need no chart.
    BoundaryStraightened,
}

/// Tolerance used when locating deformed endpoints on `∂Ω`.
pub(crate) const WALL_TOL: f64 = 1e-7;

/// Region of the disk where the chart flow is blended in, as fractions of the radius.
const BLEND_INNER: f64 = 0.3;
const BLEND_OUTER: f64 = 0.7;

fn smooth_step(x: f64) -> (f64, f64) {
    // C∞ step from 0 (x ≤ 0) to 1 (x ≥ 1) with derivative
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let df = |s: f64| if s > 0.0 { (-1.0 / s).exp() / (s * s) } else { 0.0 };
    let (a, b) = (f(x), f(1.0 - x));
    let den = a + b;
    let val = a / den;
    let d = (df(x) * b + a * df(1.0 - x)) / (den * den);
    (val, d)
}

/// Unit normal and its parameter derivatives.
pub(crate) fn normal_with_derivatives(jet: &Jet, n: usize, orientation: f64) -> (Vec3, [Vec3; 2]) {
    if n == 1 {
        let p1 = jet.du[0];
        let len = p1.norm();
        let t = p1 / len;
        let dt = (jet.d2[0] - t * t.dot(&jet.d2[0])) / len;
        (rot_cw(&t) * orientation, [rot_cw(&dt) * orientation, Vec3::zeros()])
    } else {
        let (pu, pv) = (jet.du[0], jet.du[1]);
        let c = pu.cross(&pv);
        let len = c.norm();
        let nh = c / len;
        let cu = jet.d2[0].cross(&pv) + pu.cross(&jet.d2[1]);
        let cv = jet.d2[1].cross(&pv) + pu.cross(&jet.d2[2]);
        let d = |ci: Vec3| (ci - nh * nh.dot(&ci)) / len * orientation;
        (nh * orientation, [d(cu), d(cv)])
    }
}

#[derive(Debug, Clone)]
struct Chart {
    center: Vec3,
    radius: f64,
}

/// Parametrization of `Σ_t`.
#[derive(Debug, Clone)]
pub struct DeformedParam {
    base: Arc<dyn Parametrization>,
    orientation: f64,
    body: ConvexBody,
    omega: Omega,
    chart: Option<Chart>,
    t: f64,
}

impl DeformedParam {
    /// Position and first parameter derivatives; exact.
    pub fn first_order(&self, u: [f64; 2]) -> (Vec3, [Vec3; 2]) {
        let b = self.base.jet(u);
        let n = self.base.domain().ranges.len();
        let t = self.t;
        let (nrm, dn) = normal_with_derivatives(&b, n, self.orientation);
        let nk = self.body.grad(&nrm);
        let hs = self.body.hessian(&nrm);
        let (w, dw) = self.omega.eval(u, &b);
        let x = nk * w;
        let dx = [0, 1].map(|i| nk * dw[i] + hs * dn[i] * w);
        let straight = (b.point + x * t, [0, 1].map(|i| b.du[i] + dx[i] * t));
        let Some(chart) = &self.chart else {
            return straight;
        };
        // polar chart about the disk center
        let q = b.point - chart.center;
        let r = q.norm();
        let rho = r / chart.radius;
        let (chi, dchi) = smooth_step((rho - BLEND_INNER) / (BLEND_OUTER - BLEND_INNER));
        if chi == 0.0 {
            return straight;
        }
        let er = q / r;
        let ephi = rot_ccw(&er);
        let phi = er.y.atan2(er.x);
        let a = x.dot(&ephi) / r;
        let bb = x.dot(&er);
        let rt = r + t * bb;
        let phit = phi + t * a;
        let et = polar(phit);
        let etp = rot_ccw(&et);
        let chart_point = chart.center + et * rt;
        let mut chart_du = [Vec3::zeros(); 2];
        let mut blend_du = [Vec3::zeros(); 2];
        for i in 0..n {
            let ri = er.dot(&b.du[i]);
            let phii = ephi.dot(&b.du[i]) / r;
            let ai = (dx[i].dot(&ephi) - phii * x.dot(&er)) / r - x.dot(&ephi) * ri / (r * r);
            let bi = dx[i].dot(&er) + phii * x.dot(&ephi);
            chart_du[i] = et * (ri + t * bi) + etp * (rt * (phii + t * ai));
            let chii = dchi / (BLEND_OUTER - BLEND_INNER) * ri / chart.radius;
            blend_du[i] =
                straight.1[i] * (1.0 - chi) + chart_du[i] * chi + (chart_point - straight.0) * chii;
        }
        (straight.0 * (1.0 - chi) + chart_point * chi, blend_du)
    }
}

impl Parametrization for DeformedParam {
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }
    fn domain(&self) -> ParamDomain {
        self.base.domain()
    }
    fn breakpoints(&self) -> Option<Vec<f64>> {
        self.base.breakpoints()
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let (p, du) = self.first_order(u);
        let d = self.base.domain();
        let n = d.ranges.len();
        let mut d2 = [Vec3::zeros(); 3];
        let mut diff = [[Vec3::zeros(); 2]; 2];
        for i in 0..n {
            let e = 1e-5 * d.ranges[i].len();
            let mut up = u;
            let mut um = u;
            up[i] += e;
            um[i] -= e;
            let (_, a) = self.first_order(up);
            let (_, b) = self.first_order(um);
            for k in 0..n {
                diff[i][k] = (a[k] - b[k]) / (2.0 * e);
            }
        }
        d2[0] = diff[0][0];
        if n == 2 {
            d2[1] = (diff[0][1] + diff[1][0]) * 0.5;
            d2[2] = diff[1][1];
        }
        Jet {
            point: p,
            du,
            d2,
        }
    }
}

/// Anisotropic area and enclosed volume of `Σ_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub area: f64,
    pub volume: f64,
}

/// A hypersurface with a velocity `X = ω N_K` and a deformation rule.
#[derive(Debug, Clone)]
pub struct Flow {
    pub(crate) surface: Hypersurface,
    pub(crate) body: ConvexBody,
    pub(crate) omega: Omega,
    pub(crate) mode: FlowMode,
    pub(crate) domain: Option<Domain>,
}

struct Totals {
    area: f64,
    flux: f64,
    shoelace: f64,
    ends: Option<(Vec3, Vec3)>,
    boundary_moved: f64,
}

impl Flow {
    pub fn new(
        surface: Hypersurface,
        body: ConvexBody,
        omega: Omega,
        mode: FlowMode,
        domain: Option<Domain>,
    ) -> Result<Self> {
        if body.dim() != surface.ambient_dim() {
            return Err(Error::InvalidArgument(format!(
                "body dimension {} does not match surface ambient dimension {}",
                body.dim(),
                surface.ambient_dim()
            )));
        }
        if let Some(d) = &domain {
            if d.dim() != body.dim() {
                return Err(Error::InvalidArgument("domain dimension mismatch".into()));
            }
        }
        if mode == FlowMode::BoundaryStraightened {
            let ok = match &domain {
                Some(d) if d.is_disk() => surface.n() == 1,
                Some(d) => !d.walls().is_empty(),
                None => false,
            };
            if !ok {
                return Err(Error::ModeUnsupported(
                    "boundary-straightened flow needs a walled domain, or a disk with a planar curve"
                        .into(),
                ));
            }
        }
        Ok(Flow {
            surface,
            body,
            omega,
            mode,
            domain,
        })
    }

    pub fn surface(&self) -> &Hypersurface {
        &self.surface
    }
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }
    pub fn omega(&self) -> &Omega {
        &self.omega
    }
    pub fn mode(&self) -> FlowMode {
        self.mode
    }
    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    /// Whether the chart flow is active (curved walls only).
    fn chart(&self) -> Option<Chart> {
        if self.mode != FlowMode::BoundaryStraightened {
            return None;
        }
        self.domain
            .as_ref()
            .and_then(|d| d.disk_geometry())
            .map(|(center, radius)| Chart { center, radius })
    }

    /// `Z = D_X X` vanishes identically for the straight-line rule and on flat walls.
    pub fn has_zero_acceleration(&self) -> bool {
        self.chart().is_none()
    }

    pub fn deformed_param(&self, t: f64) -> DeformedParam {
        DeformedParam {
            base: self.surface.param().clone(),
            orientation: self.surface.orientation(),
            body: self.body.clone(),
            omega: self.omega.clone(),
            chart: self.chart(),
            t,
        }
    }

    /// `Σ_t` as a hypersurface.
    pub fn deformed(&self, t: f64) -> Hypersurface {
        let mut h = Hypersurface::new(self.deformed_param(t)).with_panels2(self.surface.panels());
        if self.surface.orientation() < 0.0 {
            h = h.flipped();
        }
        h
    }

    fn totals(&self, t: f64) -> Result<Totals> {
        let dp = self.deformed_param(t);
        let n = self.surface.n();
        let s = self.surface.orientation();
        let mut tot = Totals {
            area: 0.0,
            flux: 0.0,
            shoelace: 0.0,
            ends: None,
            boundary_moved: 0.0,
        };
        for nd in self.surface.nodes() {
            let (p, du) = dp.first_order(nd.u);
            let base = self.surface.jet(nd.u);
            let (n0, _) = normal_with_derivatives(&base, n, s);
            let (nrm, da) = if n == 1 {
                let len = du[0].norm();
                (rot_cw(&(du[0] / len)) * s, len)
            } else {
                let c = du[0].cross(&du[1]);
                let len = c.norm();
                (c / len * s, len)
            };
            if !(da > 1e-12) || nrm.dot(&n0) <= 0.0 {
                return Err(Error::ImmersionLost(t));
            }
            tot.area += self.body.h(&nrm) * da * nd.weight;
            tot.flux += p.dot(&nrm) * da * nd.weight;
            if n == 1 {
                tot.shoelace += 0.5 * cross2(&p, &du[0]) * nd.weight;
            }
        }
        let d = self.surface.domain();
        if n == 1 && !d.closed {
            let r = d.ranges[0];
            tot.ends = Some((dp.first_order([r.start, 0.0]).0, dp.first_order([r.end, 0.0]).0));
        }
        for bn in self.surface.boundary_nodes() {
            let moved = (dp.first_order(bn.u).0 - self.surface.point(bn.u)).norm();
            tot.boundary_moved = tot.boundary_moved.max(moved);
        }
        Ok(tot)
    }

    /// Whether volumes are reported relative to `Σ_0` (no closing wall path exists).
    pub fn volume_is_relative(&self) -> bool {
        if self.surface.is_closed() {
            return false;
        }
        if self.surface.n() != 1 {
            return true;
        }
        match (&self.domain, self.surface.endpoints()) {
            (Some(d), Some((a, b))) => !matches!(
                d.closing_wall_integral(&b, &a, self.surface.orientation(), WALL_TOL),
                Ok(Some(_))
            ),
            _ => true,
        }
    }

    fn wall_path(&self, a: &Vec3, b: &Vec3) -> f64 {
        if let Some(d) = &self.domain {
            if let Ok(w) = d.short_wall_integral(a, b, WALL_TOL) {
                return w;
            }
        }
        0.5 * cross2(a, b)
    }

    fn volume_from(&self, tot: &Totals, base: &Totals) -> Result<f64> {
        let n = self.surface.n();
        let s = self.surface.orientation();
        if self.surface.is_closed() {
            return Ok(tot.flux / (n + 1) as f64);
        }
        if n == 1 {
            let (start, end) = tot.ends.expect("curve endpoints");
            if let Some(d) = &self.domain {
                if let Ok(Some(w)) = d.closing_wall_integral(&end, &start, s, WALL_TOL) {
                    return Ok(s * (tot.shoelace + w));
                }
            }
            let (start0, end0) = base.ends.expect("curve endpoints");
            return Ok(s
                * (tot.shoelace - base.shoelace
                    + self.wall_path(&end, &end0)
                    + self.wall_path(&start0, &start)));
        }
        if tot.boundary_moved > 1e-12 {
            return Err(Error::ModeUnsupported(
                "volume change of a spatial surface with moving boundary".into(),
            ));
        }
        Ok((tot.flux - base.flux) / (n + 1) as f64)
    }

    /// Functionals at a list of times.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<FlowSample>> {
        use rayon::prelude::*;
        let base = self.totals(0.0)?;
        times
            .par_iter()
            .map(|t| {
                let tot = if *t == 0.0 { self.totals(0.0)? } else { self.totals(*t)? };
                Ok(FlowSample {
                    t: *t,
                    area: tot.area,
                    volume: self.volume_from(&tot, &base)?,
                })
            })
            .collect()
    }

    /// Largest distance of deformed boundary points from `∂Ω`.
    pub fn boundary_drift(&self, t: f64) -> f64 {
        let Some(d) = &self.domain else { return 0.0 };
        let dp = self.deformed_param(t);
        self.surface
            .boundary_nodes()
            .iter()
            .map(|bn| d.slack(&dp.first_order(bn.u).0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variation::omega::OmegaSpec;

    #[test]
    fn smooth_step_derivative() {
        for x in [0.1, 0.4, 0.77] {
            let e = 1e-6;
            let fd = (smooth_step(x + e).0 - smooth_step(x - e).0) / (2.0 * e);
            assert!((fd - smooth_step(x).1).abs() < 1e-7);
        }
    }

    #[test]
    fn chart_flow_derivatives_are_exact() {
        let body = ConvexBody::fourier(1.0, &[0.1, 0.05], &[0.0, 0.02]).unwrap();
        let surface = Hypersurface::from_spec(crate::surface::SurfaceSpec::Segment {
            start: [-1.0, 0.0],
            end: [1.0, 0.0],
        })
        .unwrap();
        let omega = Omega::new(OmegaSpec::Affine { offset: 0.3, slope: vec![0.5] }, &surface).unwrap();
        let flow = Flow::new(
            surface,
            body,
            omega,
            FlowMode::BoundaryStraightened,
            Some(Domain::disk([0.0, 0.0], 1.0).unwrap()),
        )
        .unwrap();
        let dp = flow.deformed_param(0.05);
        for u in [0.05, 0.2, 0.5, 0.85, 0.97] {
            let e = 1e-6;
            let fd = (dp.first_order([u + e, 0.0]).0 - dp.first_order([u - e, 0.0]).0) / (2.0 * e);
            assert!((fd - dp.first_order([u, 0.0]).1[0]).norm() < 1e-7, "u={u}");
        }
    }

    #[test]
    fn translated_segment_volume() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let surface = Hypersurface::from_spec(crate::surface::SurfaceSpec::Segment {
            start: [0.0, 0.0],
            end: [0.0, 1.0],
        })
        .unwrap();
        let omega = Omega::new(OmegaSpec::Constant { value: 1.0 }, &surface).unwrap();
        let flow = Flow::new(surface, body, omega, FlowMode::StraightLine, None).unwrap();
        let s = flow.sample(&[0.1]).unwrap();
        assert!((s[0].volume - 0.1).abs() < 1e-14);
        assert!(flow.volume_is_relative());
    }
}
