//! Convex ambient domains: whole space, half-spaces, slabs, polyhedral
//! cones, planar polygons and planar disks.

use crate::error::{Error, Result};
use crate::geom::{angle_of, cross2, polar, rot_ccw, vec_from_slice, wrap_from, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Serializable description of a domain. Normals are inner normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    FullSpace {
        dim: usize,
    },
    /// `{x : ⟨x, normal⟩ > offset}`
    HalfSpace {
        normal: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `{x : 0 < ⟨x, normal⟩ < width}`; the normal defaults to the last axis.
    Slab {
        dim: usize,
        #[serde(default)]
        normal: Option<Vec<f64>>,
        width: f64,
    },
    /// `{x : ⟨x - apex, n_i⟩ > 0}`; in space the facets are listed cyclically.
    PolyhedralCone {
        apex: Vec<f64>,
        facet_normals: Vec<Vec<f64>>,
    },
    /// Strictly convex polygon with counterclockwise vertices.
    Polygon2d {
        vertices: Vec<[f64; 2]>,
    },
    Disk2d {
        center: [f64; 2],
        radius: f64,
    },
}

/// A closed half-space `{⟨x, normal⟩ ≥ offset}` with unit inner normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub normal: Vec3,
    pub offset: f64,
}

impl Wall {
    pub fn residual(&self, x: &Vec3) -> f64 {
        x.dot(&self.normal) - self.offset
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Full,
    HalfSpace,
    Slab,
    Cone { apex: Vec3, rays: Vec<Vec3> },
    Polygon { vertices: Vec<Vec3> },
    Disk { center: Vec3, radius: f64 },
}

/// A convex open set with piecewise smooth boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct Domain {
    spec: DomainSpec,
    dim: usize,
    walls: Vec<Wall>,
    kind: Kind,
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> Self {
        d.spec
    }
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;
    fn try_from(spec: DomainSpec) -> Result<Self> {
        Domain::from_spec(&spec)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidDomain(msg.into())
}

fn unit(dim: usize, v: &[f64], name: &str) -> Result<Vec3> {
    let v = vec_from_slice(dim, v)
        .ok_or_else(|| bad(format!("{name} must have {dim} finite entries")))?;
    let n = v.norm();
    if n < 1e-14 {
        return Err(bad(format!("{name} must be nonzero")));
    }
    Ok(v / n)
}

impl Domain {
    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        let (dim, walls, kind) = match spec {
            DomainSpec::FullSpace { dim } => {
                check_dim(*dim)?;
                (*dim, vec![], Kind::Full)
            }
            DomainSpec::HalfSpace { normal, offset } => {
                let dim = normal.len();
                check_dim(dim)?;
                if !offset.is_finite() {
                    return Err(bad("offset must be finite"));
                }
                let raw = vec_from_slice(dim, normal).ok_or_else(|| bad("normal must be finite"))?;
                let n = unit(dim, normal, "normal")?;
                let wall = Wall {
                    normal: n,
                    offset: offset / raw.norm(),
                };
                (dim, vec![wall], Kind::HalfSpace)
            }
            DomainSpec::Slab { dim, normal, width } => {
                check_dim(*dim)?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(bad(format!("width must be positive, got {width}")));
                }
                let n = match normal {
                    Some(v) => unit(*dim, v, "normal")?,
                    None => {
                        let mut e = Vec3::zeros();
                        e[dim - 1] = 1.0;
                        e
                    }
                };
                let walls = vec![
                    Wall {
                        normal: n,
                        offset: 0.0,
                    },
                    Wall {
                        normal: -n,
                        offset: -width,
                    },
                ];
                (*dim, walls, Kind::Slab)
            }
            DomainSpec::PolyhedralCone {
                apex,
                facet_normals,
            } => {
                let dim = apex.len();
                check_dim(dim)?;
                let apex = vec_from_slice(dim, apex).ok_or_else(|| bad("apex must be finite"))?;
                let normals = facet_normals
                    .iter()
                    .enumerate()
                    .map(|(i, n)| unit(dim, n, &format!("facet_normals[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let rays = cone_rays(dim, &normals)?;
                let walls = normals
                    .iter()
                    .map(|n| Wall {
                        normal: *n,
                        offset: n.dot(&apex),
                    })
                    .collect();
                (dim, walls, Kind::Cone { apex, rays })
            }
            DomainSpec::Polygon2d { vertices } => {
                let m = vertices.len();
                if m < 3 {
                    return Err(bad(format!("a polygon needs at least 3 vertices, got {m}")));
                }
                let vs: Vec<Vec3> = vertices
                    .iter()
                    .map(|p| vec_from_slice(2, p).ok_or_else(|| bad("vertices must be finite")))
                    .collect::<Result<_>>()?;
                let scale = vs.iter().fold(0.0f64, |a, v| a.max(v.norm())).max(1.0);
                let mut walls = Vec::with_capacity(m);
                for i in 0..m {
                    let a = vs[i];
                    let b = vs[(i + 1) % m];
                    let c = vs[(i + 2) % m];
                    let e = b - a;
                    if e.norm() < 1e-12 * scale {
                        return Err(bad(format!("vertices {i} and {} coincide", (i + 1) % m)));
                    }
                    if cross2(&e, &(c - b)) <= 1e-12 * scale * scale {
                        return Err(bad(
                            "vertices must be listed counterclockwise and form a strictly convex polygon",
                        ));
                    }
                    let n = rot_ccw(&e).normalize();
                    walls.push(Wall {
                        normal: n,
                        offset: n.dot(&a),
                    });
                }
                // Turning number one: total exterior angle 2π.
                let turn: f64 = (0..m)
                    .map(|i| {
                        let e0 = vs[(i + 1) % m] - vs[i];
                        let e1 = vs[(i + 2) % m] - vs[(i + 1) % m];
                        cross2(&e0, &e1).atan2(e0.dot(&e1))
                    })
                    .sum();
                if (turn - TAU).abs() > 1e-6 {
                    return Err(bad("polygon must be simple"));
                }
                (2, walls, Kind::Polygon { vertices: vs })
            }
            DomainSpec::Disk2d { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(bad(format!("radius must be positive, got {radius}")));
                }
                let c = vec_from_slice(2, center).ok_or_else(|| bad("center must be finite"))?;
                (
                    2,
                    vec![],
                    Kind::Disk {
                        center: c,
                        radius: *radius,
                    },
                )
            }
        };
        Ok(Domain {
            spec: spec.clone(),
            dim,
            walls,
            kind,
        })
    }

    pub fn full_space(dim: usize) -> Result<Self> {
        Self::from_spec(&DomainSpec::FullSpace { dim })
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        Self::from_spec(&DomainSpec::Polygon2d {
            vertices: vertices.to_vec(),
        })
    }

    pub fn unit_square() -> Self {
        Self::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("valid square")
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self> {
        Self::from_spec(&DomainSpec::Disk2d { center, radius })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.kind, Kind::Polygon { .. } | Kind::Disk { .. })
    }

    pub fn is_polygon(&self) -> bool {
        matches!(self.kind, Kind::Polygon { .. })
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.kind, Kind::Disk { .. })
    }

    /// Polygon vertices, counterclockwise.
    pub fn vertices(&self) -> &[Vec3] {
        match &self.kind {
            Kind::Polygon { vertices } => vertices,
            _ => &[],
        }
    }

    /// Disk center and radius.
    pub fn disk_geometry(&self) -> Option<(Vec3, f64)> {
        match &self.kind {
            Kind::Disk { center, radius } => Some((*center, *radius)),
            _ => None,
        }
    }

    /// Cone apex and extreme rays.
    pub fn cone_geometry(&self) -> Option<(Vec3, &[Vec3])> {
        match &self.kind {
            Kind::Cone { apex, rays } => Some((*apex, rays)),
            _ => None,
        }
    }

    /// Signed slack: positive inside, zero on the boundary.
    pub fn slack(&self, x: &Vec3) -> f64 {
        match &self.kind {
            Kind::Disk { center, radius } => radius - (x - center).norm(),
            _ => self
                .walls
                .iter()
                .map(|w| w.residual(x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Closed membership up to `tol`.
    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        self.slack(x) >= -tol
    }

    pub fn on_boundary(&self, x: &Vec3, tol: f64) -> bool {
        !matches!(self.kind, Kind::Full) && self.slack(x).abs() <= tol
    }

    /// Unit inner normal `ξ` at a boundary point.
    pub fn inner_normal(&self, x: &Vec3, tol: f64) -> Result<Vec3> {
        let s = self.slack(x);
        if matches!(self.kind, Kind::Full) || s.abs() > tol {
            return Err(Error::NotOnBoundary(if s.is_finite() { s.abs() } else { f64::INFINITY }));
        }
        match &self.kind {
            Kind::Disk { center, .. } => Ok((center - x).normalize()),
            _ => {
                let w = self
                    .walls
                    .iter()
                    .min_by(|a, b| a.residual(x).abs().total_cmp(&b.residual(x).abs()))
                    .expect("walls");
                Ok(w.normal)
            }
        }
    }

    /// Second fundamental form of `∂Ω` with respect to `ξ`, `II(v, v)`.
    pub fn second_form(&self, x: &Vec3, v: &Vec3, tol: f64) -> Result<f64> {
        let xi = self.inner_normal(x, tol)?;
        match &self.kind {
            Kind::Disk { radius, .. } => {
                let t = v - xi * xi.dot(v);
                Ok(t.norm_squared() / radius)
            }
            _ => Ok(0.0),
        }
    }

    pub fn volume(&self) -> Option<f64> {
        match &self.kind {
            Kind::Polygon { vertices } => {
                let m = vertices.len();
                Some(0.5 * (0..m).map(|i| cross2(&vertices[i], &vertices[(i + 1) % m])).sum::<f64>())
            }
            Kind::Disk { radius, .. } => Some(PI * radius * radius),
            _ => None,
        }
    }

    pub fn centroid(&self) -> Option<Vec3> {
        match &self.kind {
            Kind::Polygon { vertices } => {
                let m = vertices.len();
                let mut c = Vec3::zeros();
                let mut a = 0.0;
                for i in 0..m {
                    let (p, q) = (vertices[i], vertices[(i + 1) % m]);
                    let w = cross2(&p, &q);
                    a += w;
                    c += (p + q) * w;
                }
                Some(c / (3.0 * a))
            }
            Kind::Disk { center, .. } => Some(*center),
            _ => None,
        }
    }

    /// Perimeter of a bounded planar domain.
    pub fn boundary_length(&self) -> Option<f64> {
        match &self.kind {
            Kind::Polygon { vertices } => {
                let m = vertices.len();
                Some((0..m).map(|i| (vertices[(i + 1) % m] - vertices[i]).norm()).sum())
            }
            Kind::Disk { radius, .. } => Some(TAU * radius),
            _ => None,
        }
    }

    /// Arc-length position of a boundary point of a bounded planar domain
    /// (polar angle in `[0, 2π)` for disks).
    pub fn boundary_param(&self, x: &Vec3, tol: f64) -> Result<f64> {
        let s = self.slack(x);
        if s.abs() > tol {
            return Err(Error::NotOnBoundary(s.abs()));
        }
        match &self.kind {
            Kind::Polygon { vertices } => {
                let m = vertices.len();
                let (i, _) = self
                    .walls
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.residual(x).abs().total_cmp(&b.1.residual(x).abs()))
                    .expect("walls");
                let mut acc = 0.0;
                for k in 0..i {
                    acc += (vertices[(k + 1) % m] - vertices[k]).norm();
                }
                let e = vertices[(i + 1) % m] - vertices[i];
                let t = (x - vertices[i]).dot(&e) / e.norm();
                Ok(acc + t.clamp(0.0, e.norm()))
            }
            Kind::Disk { center, .. } => Ok(wrap_from(angle_of(&(x - center)), 0.0)),
            _ => Err(Error::ModeUnsupported("boundary parameter of an unbounded domain".into())),
        }
    }

    /// Boundary point at a parameter from [`Domain::boundary_param`].
    pub fn boundary_point(&self, s: f64) -> Option<Vec3> {
        match &self.kind {
            Kind::Polygon { vertices } => {
                let m = vertices.len();
                let total = self.boundary_length()?;
                let mut s = s.rem_euclid(total);
                for i in 0..m {
                    let e = vertices[(i + 1) % m] - vertices[i];
                    let l = e.norm();
                    if s <= l || i == m - 1 {
                        return Some(vertices[i] + e * (s.min(l) / l));
                    }
                    s -= l;
                }
                None
            }
            Kind::Disk { center, radius } => Some(center + polar(s) * *radius),
            _ => None,
        }
    }

    /// `½ ∫ x × dx` along `∂Ω` counterclockwise from `a` to `b`.
    pub fn ccw_wall_integral(&self, a: &Vec3, b: &Vec3, tol: f64) -> Result<f64> {
        let sa = self.boundary_param(a, tol)?;
        let sb = self.boundary_param(b, tol)?;
        match &self.kind {
            Kind::Polygon { vertices } => {
                let total = self.boundary_length().unwrap();
                let m = vertices.len();
                let mut span = sb - sa;
                if span < 0.0 {
                    span += total;
                }
                let mut pts = vec![*a];
                let mut acc = 0.0;
                let mut cum = Vec::with_capacity(m);
                for k in 0..m {
                    cum.push(acc);
                    acc += (vertices[(k + 1) % m] - vertices[k]).norm();
                }
                // vertices strictly between a and b along the ccw direction
                let mut inner: Vec<(f64, Vec3)> = (0..m)
                    .filter_map(|k| {
                        let mut d = cum[k] - sa;
                        if d < 0.0 {
                            d += total;
                        }
                        (d > 0.0 && d < span).then_some((d, vertices[k]))
                    })
                    .collect();
                inner.sort_by(|x, y| x.0.total_cmp(&y.0));
                pts.extend(inner.into_iter().map(|x| x.1));
                pts.push(*b);
                Ok(0.5 * pts.windows(2).map(|w| cross2(&w[0], &w[1])).sum::<f64>())
            }
            Kind::Disk { center, radius } => {
                let mut span = sb - sa;
                if span < 0.0 {
                    span += TAU;
                }
                Ok(disk_arc_integral(center, *radius, sa, sa + span))
            }
            _ => Err(Error::ModeUnsupported("wall path of an unbounded domain".into())),
        }
    }

    /// Wall integral that closes a curve from `end` back to `start`, with the
    /// enclosed region on the side of the curve opposite to its normal.
    /// `orientation` is `+1` when the region lies to the left of the curve.
    pub fn closing_wall_integral(
        &self,
        end: &Vec3,
        start: &Vec3,
        orientation: f64,
        tol: f64,
    ) -> Result<Option<f64>> {
        match &self.kind {
            Kind::Polygon { .. } | Kind::Disk { .. } => {
                if orientation > 0.0 {
                    Ok(Some(self.ccw_wall_integral(end, start, tol)?))
                } else {
                    Ok(Some(-self.ccw_wall_integral(start, end, tol)?))
                }
            }
            Kind::Cone { apex, .. } if self.dim == 2 => {
                for p in [end, start] {
                    let s = self.slack(p);
                    if s.abs() > tol {
                        return Err(Error::NotOnBoundary(s.abs()));
                    }
                }
                Ok(Some(0.5 * (cross2(end, apex) + cross2(apex, start))))
            }
            _ => Ok(None),
        }
    }

    /// `½ ∫ x × dx` along the shorter boundary path from `a` to `b`.
    pub fn short_wall_integral(&self, a: &Vec3, b: &Vec3, tol: f64) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::ModeUnsupported("wall paths are planar".into()));
        }
        match &self.kind {
            Kind::Polygon { .. } | Kind::Disk { .. } => {
                let total = self.boundary_length().unwrap();
                let sa = self.boundary_param(a, tol)?;
                let sb = self.boundary_param(b, tol)?;
                let mut span = sb - sa;
                if span < 0.0 {
                    span += if self.is_disk() { TAU } else { total };
                }
                let period = if self.is_disk() { TAU } else { total };
                if span <= 0.5 * period {
                    self.ccw_wall_integral(a, b, tol)
                } else {
                    Ok(-self.ccw_wall_integral(b, a, tol)?)
                }
            }
            Kind::Full => Err(Error::NotOnBoundary(f64::INFINITY)),
            _ => {
                let wa = self.nearest_wall(a, tol)?;
                let wb = self.nearest_wall(b, tol)?;
                if wa == wb {
                    Ok(0.5 * cross2(a, b))
                } else if let Kind::Cone { apex, .. } = &self.kind {
                    Ok(0.5 * (cross2(a, apex) + cross2(apex, b)))
                } else {
                    Err(Error::ModeUnsupported(
                        "points on different walls of a slab".into(),
                    ))
                }
            }
        }
    }

    fn nearest_wall(&self, x: &Vec3, tol: f64) -> Result<usize> {
        let (i, w) = self
            .walls
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.residual(x).abs().total_cmp(&b.1.residual(x).abs()))
            .ok_or(Error::NotOnBoundary(f64::INFINITY))?;
        let r = w.residual(x).abs();
        if r > tol || self.slack(x) < -tol {
            return Err(Error::NotOnBoundary(r));
        }
        Ok(i)
    }

    /// Counterclockwise boundary polyline of a bounded planar domain.
    pub fn boundary_polyline(&self, samples: usize) -> Vec<Vec3> {
        match &self.kind {
            Kind::Polygon { vertices } => {
                let mut v = vertices.clone();
                v.push(vertices[0]);
                v
            }
            Kind::Disk { center, radius } => (0..=samples)
                .map(|i| center + polar(TAU * i as f64 / samples as f64) * *radius)
                .collect(),
            _ => vec![],
        }
    }
}

/// `½ ∫ x × dx` along the circle arc from angle `a` to `b`.
pub fn disk_arc_integral(c: &Vec3, r: f64, a: f64, b: f64) -> f64 {
    0.5 * (c.x * r * (b.sin() - a.sin()) + c.y * r * (a.cos() - b.cos()) + r * r * (b - a))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(bad(format!("dim must be 2 or 3, got {dim}")))
    }
}

fn cone_rays(dim: usize, normals: &[Vec3]) -> Result<Vec<Vec3>> {
    let m = normals.len();
    let rays: Vec<Vec3> = if dim == 2 {
        if m != 2 {
            return Err(bad(format!("a planar cone has 2 facets, got {m}")));
        }
        (0..2)
            .map(|i| {
                let r = rot_ccw(&normals[i]);
                if r.dot(&normals[1 - i]) >= 0.0 {
                    r
                } else {
                    -r
                }
            })
            .collect()
    } else {
        if m < 3 {
            return Err(bad(format!("a spatial cone needs at least 3 facets, got {m}")));
        }
        let sum: Vec3 = normals.iter().sum();
        (0..m)
            .map(|i| {
                let r = normals[i].cross(&normals[(i + 1) % m]);
                let r = if r.dot(&sum) >= 0.0 { r } else { -r };
                r.normalize()
            })
            .collect()
    };
    for r in &rays {
        if !r.iter().all(|x| x.is_finite()) || r.norm() < 0.5 {
            return Err(bad("facet normals must be pairwise independent"));
        }
        for n in normals {
            if r.dot(n) < -1e-10 {
                return Err(bad("facets do not bound a pointed convex cone in the given order"));
            }
        }
    }
    let mid: Vec3 = rays.iter().sum();
    if normals.iter().any(|n| mid.dot(n) <= 1e-10 * mid.norm()) {
        return Err(bad("cone has empty interior"));
    }
    Ok(rays)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_basics() {
        let d = Domain::unit_square();
        assert_eq!(d.volume(), Some(1.0));
        assert!(d.contains(&Vec3::new(0.5, 0.5, 0.0), 0.0));
        assert!(!d.contains(&Vec3::new(1.5, 0.5, 0.0), 0.0));
        let xi = d.inner_normal(&Vec3::new(1.0, 0.3, 0.0), 1e-12).unwrap();
        assert!((xi - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            d.inner_normal(&Vec3::new(0.5, 0.5, 0.0), 1e-8),
            Err(Error::NotOnBoundary(_))
        ));
    }

    #[test]
    fn clockwise_polygon_rejected() {
        assert!(Domain::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn wall_paths_close_regions() {
        let d = Domain::unit_square();
        let a = Vec3::new(0.5, 0.0, 0.0);
        let b = Vec3::new(0.0, 0.5, 0.0);
        // a -> b keeps the corner triangle on its left
        let chord = 0.5 * cross2(&a, &b);
        let corner = chord + d.ccw_wall_integral(&b, &a, 1e-12).unwrap();
        assert!((corner - 0.125).abs() < 1e-14);
        let rest = -chord + d.ccw_wall_integral(&a, &b, 1e-12).unwrap();
        assert!((rest - 0.875).abs() < 1e-14);
    }

    #[test]
    fn disk_wall_integral_full_circle() {
        let d = Domain::disk([0.3, -0.2], 2.0).unwrap();
        let v = disk_arc_integral(&Vec3::new(0.3, -0.2, 0.0), 2.0, 0.1, 0.1 + TAU);
        assert!((v - d.volume().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cone_rays_are_extreme() {
        let d = Domain::from_spec(&DomainSpec::PolyhedralCone {
            apex: vec![0.0, 0.0, 0.0],
            facet_normals: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        })
        .unwrap();
        let (_, rays) = d.cone_geometry().unwrap();
        for r in rays {
            assert!(r.iter().all(|x| *x >= 0.0));
        }
        assert!(Domain::from_spec(&DomainSpec::PolyhedralCone {
            apex: vec![0.0, 0.0],
            facet_normals: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
        })
        .is_err());
    }

    #[test]
    fn spec_rejects_unknown_fields() {
        let r: std::result::Result<Domain, _> =
            serde_json::from_str(r#"{"kind":"disk2d","center":[0,0],"radius":1,"extra":2}"#);
        assert!(r.is_err());
        let d: Domain = serde_json::from_str(r#"{"kind":"disk2d","center":[0,0],"radius":1}"#).unwrap();
        assert!(d.is_disk());
    }
}
