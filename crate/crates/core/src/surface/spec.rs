use super::shapes::{
    Arc2, Circle, Ellipse, EllipsoidPatch, FlatDisk, PlanePatch, Segment, WulffCurve,
};
use super::spline::PeriodicSpline;
use super::Hypersurface;
use crate::body::{BodySpec, ConvexBody};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Serializable surface geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    Segment {
        start: [f64; 2],
        end: [f64; 2],
    },
    /// Counterclockwise circular arc between two polar angles.
    Arc {
        center: [f64; 2],
        radius: f64,
        angles: [f64; 2],
    },
    /// Boundary of `center + scale·K`.
    Wulff {
        body: BodySpec,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Part of a planar Wulff shape between two outer-normal angles.
    WulffArc {
        body: BodySpec,
        center: [f64; 2],
        #[serde(default = "one")]
        scale: f64,
        angles: [f64; 2],
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    /// Patch of an axis-aligned ellipsoid over polar and azimuthal angle ranges.
    Ellipsoid {
        center: [f64; 3],
        semi_axes: [f64; 3],
        #[serde(default = "full_theta")]
        theta: [f64; 2],
        #[serde(default = "full_phi")]
        phi: [f64; 2],
    },
    PlanePatch {
        origin: [f64; 3],
        e1: [f64; 3],
        e2: [f64; 3],
        u: [f64; 2],
        v: [f64; 2],
    },
    Disk {
        center: [f64; 3],
        #[serde(default = "ex")]
        e1: [f64; 3],
        #[serde(default = "ey")]
        e2: [f64; 3],
        radius: f64,
    },
    /// Closed periodic cubic spline through planar control points.
    ControlPoints {
        points: Vec<[f64; 2]>,
    },
}

fn one() -> f64 {
    1.0
}
fn full_theta() -> [f64; 2] {
    [0.0, PI]
}
fn full_phi() -> [f64; 2] {
    [0.0, TAU]
}
fn ex() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}
fn ey() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

/// Geometry plus orientation and quadrature settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub geometry: SurfaceSpec,
    #[serde(default)]
    pub flip_normal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
}

impl From<SurfaceSpec> for SurfaceConfig {
    fn from(geometry: SurfaceSpec) -> Self {
        SurfaceConfig {
            geometry,
            flip_normal: false,
            panels: None,
        }
    }
}

fn v2(p: [f64; 2]) -> Vec3 {
    Vec3::new(p[0], p[1], 0.0)
}
fn v3(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSurface(format!("{name} must be positive, got {x}")))
    }
}

fn finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidSurface(format!("{name} must be finite")))
    }
}

impl Hypersurface {
    pub fn from_config(config: &SurfaceConfig) -> Result<Hypersurface> {
        let s = build(&config.geometry)?;
        let s = match config.panels {
            Some(0) => return Err(Error::InvalidSurface("panels must be positive".into())),
            Some(p) => s.with_panels(p),
            None => s,
        };
        let s = if config.flip_normal { s.flipped() } else { s };
        let mut c = config.clone();
        c.flip_normal = config.flip_normal;
        Ok(s.with_config(c))
    }

    pub fn from_spec(spec: SurfaceSpec) -> Result<Hypersurface> {
        Self::from_config(&spec.into())
    }
}

fn build(spec: &SurfaceSpec) -> Result<Hypersurface> {
    Ok(match spec {
        SurfaceSpec::Circle { center, radius } => {
            finite("center", center)?;
            positive("radius", *radius)?;
            Hypersurface::new(Circle {
                center: v2(*center),
                radius: *radius,
            })
        }
        SurfaceSpec::Ellipse {
            center,
            semi_axes,
            rotation,
        } => {
            finite("center", center)?;
            positive("semi_axes[0]", semi_axes[0])?;
            positive("semi_axes[1]", semi_axes[1])?;
            finite("rotation", &[*rotation])?;
            Hypersurface::new(Ellipse {
                center: v2(*center),
                semi_axes: *semi_axes,
                rotation: *rotation,
            })
        }
        SurfaceSpec::Segment { start, end } => {
            finite("start", start)?;
            finite("end", end)?;
            if (v2(*start) - v2(*end)).norm() == 0.0 {
                return Err(Error::InvalidSurface("segment endpoints coincide".into()));
            }
            Hypersurface::new(Segment {
                start: v2(*start),
                end: v2(*end),
            })
        }
        SurfaceSpec::Arc {
            center,
            radius,
            angles,
        } => {
            finite("center", center)?;
            positive("radius", *radius)?;
            if !(angles[1] > angles[0]) || angles[1] - angles[0] > TAU {
                return Err(Error::InvalidSurface(
                    "arc angles must increase by at most 2π".into(),
                ));
            }
            Hypersurface::new(Arc2 {
                center: v2(*center),
                radius: *radius,
                angles: *angles,
            })
        }
        SurfaceSpec::Wulff {
            body,
            center,
            scale,
        } => {
            let body = ConvexBody::from_spec(body)?;
            let c = if center.is_empty() {
                Vec3::zeros()
            } else {
                crate::geom::vec_from_slice(body.dim(), center).ok_or_else(|| {
                    Error::InvalidSurface(format!("center must have {} finite entries", body.dim()))
                })?
            };
            super::shapes::wulff(&body, c, *scale)?
        }
        SurfaceSpec::WulffArc {
            body,
            center,
            scale,
            angles,
        } => {
            let body = ConvexBody::from_spec(body)?;
            finite("center", center)?;
            positive("scale", *scale)?;
            if body.dim() != 2 {
                return Err(Error::InvalidSurface("wulff_arc needs a planar body".into()));
            }
            if !(angles[1] > angles[0]) || angles[1] - angles[0] > TAU {
                return Err(Error::InvalidSurface(
                    "arc angles must increase by at most 2π".into(),
                ));
            }
            Hypersurface::new(WulffCurve {
                body,
                center: v2(*center),
                scale: *scale,
                angles: *angles,
                closed: false,
            })
        }
        SurfaceSpec::Sphere { center, radius } => {
            finite("center", center)?;
            positive("radius", *radius)?;
            Hypersurface::new(super::shapes::sphere(v3(*center), *radius))
        }
        SurfaceSpec::Ellipsoid {
            center,
            semi_axes,
            theta,
            phi,
        } => {
            finite("center", center)?;
            for (i, a) in semi_axes.iter().enumerate() {
                positive(&format!("semi_axes[{i}]"), *a)?;
            }
            if !(0.0 <= theta[0] && theta[0] < theta[1] && theta[1] <= PI) {
                return Err(Error::InvalidSurface("theta must satisfy 0 ≤ θ0 < θ1 ≤ π".into()));
            }
            if !(phi[1] > phi[0]) || phi[1] - phi[0] > TAU + 1e-12 {
                return Err(Error::InvalidSurface(
                    "phi must increase by at most 2π".into(),
                ));
            }
            Hypersurface::new(EllipsoidPatch {
                center: v3(*center),
                semi_axes: *semi_axes,
                theta: *theta,
                phi: *phi,
            })
        }
        SurfaceSpec::PlanePatch {
            origin,
            e1,
            e2,
            u,
            v,
        } => {
            finite("origin", origin)?;
            finite("e1", e1)?;
            finite("e2", e2)?;
            if v3(*e1).cross(&v3(*e2)).norm() < 1e-12 {
                return Err(Error::InvalidSurface("e1 and e2 must be independent".into()));
            }
            if !(u[1] > u[0] && v[1] > v[0]) {
                return Err(Error::InvalidSurface("parameter ranges must increase".into()));
            }
            Hypersurface::new(PlanePatch {
                origin: v3(*origin),
                e1: v3(*e1),
                e2: v3(*e2),
                u: *u,
                v: *v,
            })
        }
        SurfaceSpec::Disk {
            center,
            e1,
            e2,
            radius,
        } => {
            finite("center", center)?;
            positive("radius", *radius)?;
            let (a, b) = (v3(*e1), v3(*e2));
            if (a.norm() - 1.0).abs() > 1e-9 || (b.norm() - 1.0).abs() > 1e-9 || a.dot(&b).abs() > 1e-9
            {
                return Err(Error::InvalidSurface("e1 and e2 must be orthonormal".into()));
            }
            Hypersurface::new(FlatDisk {
                center: v3(*center),
                e1: a,
                e2: b,
                radius: *radius,
            })
        }
        SurfaceSpec::ControlPoints { points } => {
            for p in points {
                finite("points", p)?;
            }
            Hypersurface::new(PeriodicSpline::new(points.iter().map(|p| v2(*p)).collect())?)
        }
    })
}
