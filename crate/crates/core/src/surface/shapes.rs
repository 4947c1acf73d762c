//! Built-in parametrizations.

use super::{Hypersurface, Jet, ParamDomain, ParamRange, Parametrization};
use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::geom::{polar, rot_ccw, Vec3};
use crate::poly::Polynomial;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

fn curve_domain(start: f64, end: f64, closed: bool) -> ParamDomain {
    ParamDomain {
        ranges: vec![ParamRange::new(start, end, closed)],
        closed,
        boundary_sides: [!closed, !closed, false, false],
    }
}

fn curve_jet(p: Vec3, d1: Vec3, d2: Vec3) -> Jet {
    Jet {
        point: p,
        du: [d1, Vec3::zeros()],
        d2: [d2, Vec3::zeros(), Vec3::zeros()],
    }
}

#[derive(Debug, Clone)]
pub struct Circle {
    pub center: Vec3,
    pub radius: f64,
}

impl Parametrization for Circle {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        curve_domain(0.0, TAU, true)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let e = polar(u[0]);
        curve_jet(self.center + e * self.radius, rot_ccw(&e) * self.radius, -e * self.radius)
    }
}

/// Ellipse `c + R(rotation) (a cos t, b sin t)`.
#[derive(Debug, Clone)]
pub struct Ellipse {
    pub center: Vec3,
    pub semi_axes: [f64; 2],
    pub rotation: f64,
}

impl Parametrization for Ellipse {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        curve_domain(0.0, TAU, true)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let (s, c) = u[0].sin_cos();
        let (a, b) = (self.semi_axes[0], self.semi_axes[1]);
        let (rs, rc) = self.rotation.sin_cos();
        let rot = |x: f64, y: f64| Vec3::new(rc * x - rs * y, rs * x + rc * y, 0.0);
        curve_jet(
            self.center + rot(a * c, b * s),
            rot(-a * s, b * c),
            rot(-a * c, -b * s),
        )
    }
}

/// Straight segment from `start` to `end`, parameter in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: Vec3,
    pub end: Vec3,
}

impl Parametrization for Segment {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        curve_domain(0.0, 1.0, false)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let d = self.end - self.start;
        curve_jet(self.start + d * u[0], d, Vec3::zeros())
    }
}

/// Planar circular arc, counterclockwise from `angles[0]` to `angles[1]`.
#[derive(Debug, Clone)]
pub struct Arc2 {
    pub center: Vec3,
    pub radius: f64,
    pub angles: [f64; 2],
}

impl Parametrization for Arc2 {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        curve_domain(self.angles[0], self.angles[1], false)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        Circle {
            center: self.center,
            radius: self.radius,
        }
        .jet(u)
    }
}

/// Boundary of `center + scale·K` in the plane, parametrized by the angle
/// of the outer normal.
#[derive(Debug, Clone)]
pub struct WulffCurve {
    pub body: ConvexBody,
    pub center: Vec3,
    pub scale: f64,
    pub angles: [f64; 2],
    pub closed: bool,
}

impl Parametrization for WulffCurve {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> ParamDomain {
        curve_domain(self.angles[0], self.angles[1], self.closed)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let t = u[0];
        let j = self.body.circle_jet(t);
        let e = polar(t);
        let ep = rot_ccw(&e);
        let l = self.scale;
        curve_jet(
            self.center + (e * j[0] + ep * j[1]) * l,
            ep * ((j[0] + j[2]) * l),
            (ep * (j[1] + j[3]) - e * (j[0] + j[2])) * l,
        )
    }
}

fn sphere_frame(t: f64, f: f64) -> [Vec3; 6] {
    // u, u_t, u_f, u_tt, u_tf, u_ff
    let (st, ct) = t.sin_cos();
    let (sf, cf) = f.sin_cos();
    [
        Vec3::new(st * cf, st * sf, ct),
        Vec3::new(ct * cf, ct * sf, -st),
        Vec3::new(-st * sf, st * cf, 0.0),
        Vec3::new(-st * cf, -st * sf, -ct),
        Vec3::new(-ct * sf, ct * cf, 0.0),
        Vec3::new(-st * cf, -st * sf, 0.0),
    ]
}

fn sphere_domain(theta: [f64; 2], phi: [f64; 2]) -> ParamDomain {
    let full_phi = (phi[1] - phi[0] - TAU).abs() < 1e-12;
    let closed = full_phi && theta[0].abs() < 1e-12 && (theta[1] - PI).abs() < 1e-12;
    ParamDomain {
        ranges: vec![
            ParamRange::new(theta[0], theta[1], false),
            ParamRange::new(phi[0], phi[1], full_phi),
        ],
        closed,
        boundary_sides: [
            theta[0].abs() > 1e-12,
            (theta[1] - PI).abs() > 1e-12,
            !full_phi,
            !full_phi,
        ],
    }
}

/// Axis-aligned ellipsoid patch `c + diag(a) u(θ, φ)` with polar angle `θ`.
#[derive(Debug, Clone)]
pub struct EllipsoidPatch {
    pub center: Vec3,
    pub semi_axes: [f64; 3],
    pub theta: [f64; 2],
    pub phi: [f64; 2],
}

impl Parametrization for EllipsoidPatch {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> ParamDomain {
        sphere_domain(self.theta, self.phi)
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let s = sphere_frame(u[0], u[1]);
        let d = Vec3::new(self.semi_axes[0], self.semi_axes[1], self.semi_axes[2]);
        let m = |v: Vec3| v.component_mul(&d);
        Jet {
            point: self.center + m(s[0]),
            du: [m(s[1]), m(s[2])],
            d2: [m(s[3]), m(s[4]), m(s[5])],
        }
    }
}

/// Round sphere.
pub fn sphere(center: Vec3, radius: f64) -> EllipsoidPatch {
    EllipsoidPatch {
        center,
        semi_axes: [radius; 3],
        theta: [0.0, PI],
        phi: [0.0, TAU],
    }
}

/// Boundary of `center + scale·K` in space for a quadratic body,
/// parametrized by the outer normal in spherical coordinates.
#[derive(Debug, Clone)]
pub struct WulffSurface {
    pub body: ConvexBody,
    pub center: Vec3,
    pub scale: f64,
}

impl Parametrization for WulffSurface {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> ParamDomain {
        sphere_domain([0.0, PI], [0.0, TAU])
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let s = sphere_frame(u[0], u[1]);
        let w = s[0];
        let h = self.body.hessian(&w);
        let third = |a: &Vec3, b: &Vec3| self.body.third(&w, a, b).expect("quadratic body");
        let l = self.scale;
        Jet {
            point: self.center + self.body.grad(&w) * l,
            du: [h * s[1] * l, h * s[2] * l],
            d2: [
                (third(&s[1], &s[1]) + h * s[3]) * l,
                (third(&s[1], &s[2]) + h * s[4]) * l,
                (third(&s[2], &s[2]) + h * s[5]) * l,
            ],
        }
    }
}

/// Flat parallelogram `origin + u e1 + v e2`.
#[derive(Debug, Clone)]
pub struct PlanePatch {
    pub origin: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Parametrization for PlanePatch {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> ParamDomain {
        ParamDomain {
            ranges: vec![
                ParamRange::new(self.u[0], self.u[1], false),
                ParamRange::new(self.v[0], self.v[1], false),
            ],
            closed: false,
            boundary_sides: [true; 4],
        }
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        Jet {
            point: self.origin + self.e1 * u[0] + self.e2 * u[1],
            du: [self.e1, self.e2],
            d2: [Vec3::zeros(); 3],
        }
    }
}

/// Flat disk in polar coordinates `(r, φ)`; the boundary is `r = radius`.
#[derive(Debug, Clone)]
pub struct FlatDisk {
    pub center: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub radius: f64,
}

impl Parametrization for FlatDisk {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> ParamDomain {
        ParamDomain {
            ranges: vec![
                ParamRange::new(0.0, self.radius, false),
                ParamRange::new(0.0, TAU, true),
            ],
            closed: false,
            boundary_sides: [false, true, false, false],
        }
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let (s, c) = u[1].sin_cos();
        let er = self.e1 * c + self.e2 * s;
        let ef = self.e2 * c - self.e1 * s;
        Jet {
            point: self.center + er * u[0],
            du: [er, ef * u[0]],
            d2: [Vec3::zeros(), ef, -er * u[0]],
        }
    }
}

/// Piece of `∂K` over the spherical triangle spanned by directions `c, a, b`.
/// First derivatives are exact; second derivatives are difference quotients.
#[derive(Debug, Clone)]
pub struct SphericalTriangle {
    pub body: ConvexBody,
    pub corners: [Vec3; 3],
}

impl SphericalTriangle {
    fn first(&self, s: f64, t: f64) -> (Vec3, [Vec3; 2]) {
        let [c, a, b] = self.corners;
        let e = a * (1.0 - t) + b * t;
        let m = c * (1.0 - s) + e * s;
        let dm = [e - c, (b - a) * s];
        let g = self.body.gauge(&m);
        let grad_g = {
            // gauge is 1-homogeneous; its gradient at m is N/h(N) for the normal N at m/g
            let p = m / g;
            let nrm = self.body.normal_at(&p);
            nrm / self.body.h(&nrm)
        };
        let p = m / g;
        let d = [0, 1].map(|i| dm[i] / g - m * (grad_g.dot(&dm[i]) / (g * g)));
        (p, d)
    }
}

impl Parametrization for SphericalTriangle {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> ParamDomain {
        ParamDomain {
            ranges: vec![ParamRange::new(0.0, 1.0, false), ParamRange::new(0.0, 1.0, false)],
            closed: false,
            boundary_sides: [false, true, true, true],
        }
    }
    fn jet(&self, u: [f64; 2]) -> Jet {
        let (p, d) = self.first(u[0], u[1]);
        let e = 1e-5;
        let (_, ds_p) = self.first(u[0] + e, u[1]);
        let (_, ds_m) = self.first(u[0] - e, u[1]);
        let (_, dt_p) = self.first(u[0], u[1] + e);
        let (_, dt_m) = self.first(u[0], u[1] - e);
        Jet {
            point: p,
            du: d,
            d2: [
                (ds_p[0] - ds_m[0]) / (2.0 * e),
                (dt_p[0] - dt_m[0]) / (2.0 * e),
                (dt_p[1] - dt_m[1]) / (2.0 * e),
            ],
        }
    }
}

/// Radial graph `c + (1 + ε g(p - c)) (p - c)` over a base parametrization.
#[derive(Debug, Clone)]
pub struct RadialPerturbation {
    pub base: Arc<dyn Parametrization>,
    pub center: Vec3,
    pub epsilon: f64,
    pub profile: Polynomial,
}

impl Parametrization for RadialPerturbation {
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
        let b = self.base.jet(u);
        let q = b.point - self.center;
        let eps = self.epsilon;
        let s = 1.0 + eps * self.profile.value(&q);
        let gr = self.profile.gradient(&q);
        let hs = self.profile.hessian(&q);
        let dg = [gr.dot(&b.du[0]), gr.dot(&b.du[1])];
        let du = [0, 1].map(|i| b.du[i] * s + q * (eps * dg[i]));
        let second = |i: usize, j: usize, pij: &Vec3| {
            pij * s
                + b.du[i] * (eps * dg[j])
                + b.du[j] * (eps * dg[i])
                + q * (eps * (b.du[i].dot(&(hs * b.du[j])) + gr.dot(pij)))
        };
        Jet {
            point: self.center + q * s,
            du,
            d2: [second(0, 0, &b.d2[0]), second(0, 1, &b.d2[1]), second(1, 1, &b.d2[2])],
        }
    }
}

/// `∂(center + scale·K)` as a closed hypersurface with outer normal.
pub fn wulff(body: &ConvexBody, center: Vec3, scale: f64) -> Result<Hypersurface> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidSurface(format!("scale must be positive, got {scale}")));
    }
    if body.dim() == 2 {
        Ok(Hypersurface::new(WulffCurve {
            body: body.clone(),
            center,
            scale,
            angles: [0.0, TAU],
            closed: true,
        }))
    } else if body.is_quadratic() {
        Ok(Hypersurface::new(WulffSurface {
            body: body.clone(),
            center,
            scale,
        }))
    } else {
        Err(Error::ModeUnsupported("spatial Wulff shape of a non-quadratic body".into()))
    }
}

/// Arc of `∂(center + scale·K)` whose outer normal angle runs over `angles`.
pub fn wulff_arc(body: &ConvexBody, center: Vec3, scale: f64, angles: [f64; 2]) -> Result<Hypersurface> {
    if body.dim() != 2 {
        return Err(Error::ModeUnsupported("Wulff arcs are planar".into()));
    }
    if !(angles[1] > angles[0]) || angles[1] - angles[0] > TAU {
        return Err(Error::InvalidSurface("arc angles must increase by at most 2π".into()));
    }
    Ok(Hypersurface::new(WulffCurve {
        body: body.clone(),
        center,
        scale,
        angles,
        closed: false,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_jet(p: &dyn Parametrization, u: [f64; 2]) {
        let n = p.domain().ranges.len();
        let e = 1e-6;
        let j = p.jet(u);
        for i in 0..n {
            let mut up = u;
            let mut um = u;
            up[i] += e;
            um[i] -= e;
            let (jp, jm) = (p.jet(up), p.jet(um));
            let d1 = (jp.point - jm.point) / (2.0 * e);
            assert!((d1 - j.du[i]).norm() < 1e-7, "{p:?} d{i}");
            for k in 0..n {
                let idx = i + k;
                let d2 = (jp.du[k] - jm.du[k]) / (2.0 * e);
                assert!((d2 - j.d2[idx]).norm() < 1e-5, "{p:?} d{i}{k}: {d2} vs {}", j.d2[idx]);
            }
        }
    }

    #[test]
    fn derivatives_are_consistent() {
        let k2 = ConvexBody::fourier(2.0, &[0.2, 0.3], &[0.1]).unwrap();
        let k3 = ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let params: Vec<Box<dyn Parametrization>> = vec![
            Box::new(Circle {
                center: Vec3::new(0.3, 0.1, 0.0),
                radius: 1.5,
            }),
            Box::new(Ellipse {
                center: Vec3::zeros(),
                semi_axes: [2.0, 1.0],
                rotation: 0.4,
            }),
            Box::new(WulffCurve {
                body: k2.clone(),
                center: Vec3::zeros(),
                scale: 1.3,
                angles: [0.0, TAU],
                closed: true,
            }),
            Box::new(sphere(Vec3::zeros(), 2.0)),
            Box::new(WulffSurface {
                body: k3.clone(),
                center: Vec3::zeros(),
                scale: 0.8,
            }),
            Box::new(FlatDisk {
                center: Vec3::zeros(),
                e1: Vec3::x(),
                e2: Vec3::y(),
                radius: 1.0,
            }),
            Box::new(RadialPerturbation {
                base: Arc::new(sphere(Vec3::zeros(), 1.0)),
                center: Vec3::zeros(),
                epsilon: 0.1,
                profile: Polynomial {
                    terms: vec![([1, 1, 0], 1.0), ([0, 0, 2], -0.5), ([1, 0, 0], 0.3)],
                },
            }),
        ];
        for p in &params {
            check_jet(p.as_ref(), [0.7, 1.9]);
        }
    }
}
