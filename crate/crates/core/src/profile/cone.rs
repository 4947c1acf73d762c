//! Exact profiles of convex cones: `I_C(v) = (n+1) V(K∩C)^{1/(n+1)} v^{n/(n+1)}`.

use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{angle_of, orthonormal_complement, polar, Vec3};
use crate::quadrature::integrate;
use crate::surface::shapes::{wulff, wulff_arc, SphericalTriangle};
use crate::surface::Hypersurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Default Monte Carlo sample count for spatial cones.
pub const MC_SAMPLES: usize = 1_000_000;

/// A closed convex cone with apex at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Cone {
    Full { dim: usize },
    /// `{⟨x, normal⟩ ≥ 0}`
    HalfSpace { normal: Vec3, dim: usize },
    /// Planar directions with polar angle in `[start, end]`, `end - start < π`.
    Sector { start: f64, end: f64 },
    /// `{⟨x, n_i⟩ ≥ 0}` in space, with extreme rays listed cyclically.
    Polyhedral { normals: Vec<Vec3>, rays: Vec<Vec3> },
}

impl Cone {
    /// The cone of a domain translated so that its apex is the origin.
    pub fn from_domain(domain: &Domain) -> Result<(Cone, Vec3)> {
        let dim = domain.dim();
        if let Some((apex, rays)) = domain.cone_geometry() {
            let normals: Vec<Vec3> = domain.walls().iter().map(|w| w.normal).collect();
            if dim == 2 {
                let a0 = angle_of(&rays[0]);
                let a1 = angle_of(&rays[1]);
                let mut span = crate::geom::wrap_from(a1 - a0, 0.0);
                let (start, end) = if span < PI {
                    (a0, a0 + span)
                } else {
                    span = TAU - span;
                    (a1, a1 + span)
                };
                return Ok((Cone::Sector { start, end }, apex));
            }
            return Ok((
                Cone::Polyhedral {
                    normals,
                    rays: rays.to_vec(),
                },
                apex,
            ));
        }
        match domain.walls() {
            [] if !domain.is_bounded() => Ok((Cone::Full { dim }, Vec3::zeros())),
            [w] => Ok((
                Cone::HalfSpace {
                    normal: w.normal,
                    dim,
                },
                w.normal * w.offset,
            )),
            _ => Err(Error::InvalidDomain(
                "a cone, half-space or full space is required".into(),
            )),
        }
    }

    /// Support cone of a convex polygon at vertex `k`.
    pub fn polygon_corner(domain: &Domain, k: usize) -> Result<Cone> {
        let vs = domain.vertices();
        if vs.is_empty() {
            return Err(Error::InvalidDomain("polygon expected".into()));
        }
        let m = vs.len();
        let p = vs[k % m];
        let next = vs[(k + 1) % m] - p;
        let prev = vs[(k + m - 1) % m] - p;
        let start = angle_of(&next);
        let end = start + crate::geom::wrap_from(angle_of(&prev) - start, 0.0);
        Ok(Cone::Sector { start, end })
    }

    /// Planar half-plane with inner normal `normal` as a cone through the origin.
    pub fn half_plane(normal: &Vec3) -> Cone {
        Cone::HalfSpace {
            normal: normal.normalize(),
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cone::Full { dim } | Cone::HalfSpace { dim, .. } => *dim,
            Cone::Sector { .. } => 2,
            Cone::Polyhedral { .. } => 3,
        }
    }

    pub fn contains(&self, u: &Vec3) -> bool {
        match self {
            Cone::Full { .. } => true,
            Cone::HalfSpace { normal, .. } => normal.dot(u) >= 0.0,
            Cone::Sector { start, end } => {
                let a = crate::geom::wrap_from(angle_of(u), *start);
                a <= end - start
            }
            Cone::Polyhedral { normals, .. } => normals.iter().all(|n| n.dot(u) >= 0.0),
        }
    }

    /// Polar angle range of a planar cone.
    pub fn angle_range(&self) -> Option<[f64; 2]> {
        match self {
            Cone::Full { dim: 2 } => Some([0.0, TAU]),
            Cone::HalfSpace { normal, dim: 2 } => {
                let a = angle_of(normal);
                Some([a - 0.5 * PI, a + 0.5 * PI])
            }
            Cone::Sector { start, end } => Some([*start, *end]),
            _ => None,
        }
    }
}

/// `V(K ∩ C)` with the standard error of its estimate (zero for quadrature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeVolume {
    pub value: f64,
    pub std_error: f64,
    pub monte_carlo: bool,
    pub samples: usize,
}

/// `V(K ∩ C)`: polar quadrature of `ρ²/2` in the plane, stratified Monte
/// Carlo of `ρ³/3` over directions in space.
pub fn cone_body_volume(body: &ConvexBody, cone: &Cone, seed: u64) -> Result<ConeVolume> {
    cone_body_volume_with(body, cone, seed, MC_SAMPLES)
}

pub fn cone_body_volume_with(body: &ConvexBody, cone: &Cone, seed: u64, samples: usize) -> Result<ConeVolume> {
    if body.dim() != cone.dim() {
        return Err(Error::InvalidArgument("body and cone dimensions differ".into()));
    }
    if let Cone::Full { .. } = cone {
        return Ok(ConeVolume {
            value: body.volume(),
            std_error: 0.0,
            monte_carlo: false,
            samples: 0,
        });
    }
    if body.dim() == 2 {
        let [a, b] = cone.angle_range().expect("planar cone");
        let panels = (((b - a) / 0.05).ceil() as usize).max(8);
        let value = integrate(
            |t| {
                let r = body.radial(&polar(t));
                0.5 * r * r
            },
            a,
            b,
            panels,
        );
        return Ok(ConeVolume {
            value,
            std_error: 0.0,
            monte_carlo: false,
            samples: 0,
        });
    }
    monte_carlo_volume(body, cone, seed, samples)
}

/// Stratified sampling on `(z, φ)` cells of equal area, two points per cell,
/// one random stream per row of cells.
fn monte_carlo_volume(body: &ConvexBody, cone: &Cone, seed: u64, samples: usize) -> Result<ConeVolume> {
    let cells = (samples / 2).max(1);
    let rows = ((cells as f64 / 2.0).sqrt().round() as usize).max(1);
    let cols = (cells / rows).max(1);
    let f = |u: &Vec3| {
        if cone.contains(u) {
            body.radial(u).powi(3) / 3.0
        } else {
            0.0
        }
    };
    let per_row: Vec<(f64, f64)> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mut sum, mut var) = (0.0, 0.0);
            for j in 0..cols {
                let mut draw = || {
                    let z = -1.0 + 2.0 * (i as f64 + rng.random::<f64>()) / rows as f64;
                    let phi = TAU * (j as f64 + rng.random::<f64>()) / cols as f64;
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    f(&Vec3::new(s * phi.cos(), s * phi.sin(), z))
                };
                let (a, b) = (draw(), draw());
                sum += 0.5 * (a + b);
                var += 0.25 * (a - b) * (a - b);
            }
            (sum, var)
        })
        .collect();
    let m = (rows * cols) as f64;
    let (sum, var) = per_row
        .iter()
        .fold((0.0, 0.0), |acc, (s, v)| (acc.0 + s, acc.1 + v));
    let w = 4.0 * PI / m;
    Ok(ConeVolume {
        value: w * sum,
        std_error: w * var.sqrt(),
        monte_carlo: true,
        samples: 2 * rows * cols,
    })
}

/// `(n+1) θ^{1/(n+1)} v^{n/(n+1)}` with `θ = V(K ∩ C)`.
pub fn cone_profile_value(n: usize, cone_volume: f64, v: f64) -> f64 {
    let e = 1.0 / (n as f64 + 1.0);
    (n as f64 + 1.0) * cone_volume.powf(e) * v.max(0.0).powf(n as f64 * e)
}

/// `I_C(v)` for `v ≥ 0`.
pub fn cone_profile(body: &ConvexBody, cone: &Cone, v: f64, seed: u64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::InvalidArgument(format!("volume must be non-negative, got {v}")));
    }
    let theta = cone_body_volume(body, cone, seed)?;
    Ok(cone_profile_value(body.n(), theta.value, v))
}

/// Pieces of `∂K ∩ C` as hypersurfaces with outer normal.
pub fn wulff_in_cone(body: &ConvexBody, cone: &Cone) -> Result<Vec<Hypersurface>> {
    if body.dim() != cone.dim() {
        return Err(Error::InvalidArgument("body and cone dimensions differ".into()));
    }
    if body.dim() == 2 {
        if let Cone::Full { .. } = cone {
            return Ok(vec![wulff(body, Vec3::zeros(), 1.0)?]);
        }
        let [a, b] = cone.angle_range().expect("planar cone");
        let ta = body.normal_angle_of_direction(a);
        let tb = body.normal_angle_of_direction(b);
        return Ok(vec![wulff_arc(body, Vec3::zeros(), 1.0, [ta, tb])?.with_panels(64)]);
    }
    let fan: Vec<[Vec3; 3]> = match cone {
        Cone::Full { .. } => {
            let axes = [Vec3::x(), Vec3::y(), -Vec3::x(), -Vec3::y()];
            let mut t = Vec::new();
            for pole in [Vec3::z(), -Vec3::z()] {
                for k in 0..4 {
                    t.push([pole, axes[k], axes[(k + 1) % 4]]);
                }
            }
            t
        }
        Cone::HalfSpace { normal, .. } => {
            let (e1, e2) = orthonormal_complement(normal);
            let ring = [e1, e2, -e1, -e2];
            (0..4).map(|k| [*normal, ring[k], ring[(k + 1) % 4]]).collect()
        }
        Cone::Polyhedral { rays, .. } => {
            let c: Vec3 = rays.iter().sum::<Vec3>().normalize();
            (0..rays.len())
                .map(|k| [c, rays[k], rays[(k + 1) % rays.len()]])
                .collect()
        }
        Cone::Sector { .. } => unreachable!("planar cone with a spatial body"),
    };
    Ok(fan
        .into_iter()
        .map(|[c, a, b]| {
            let outward = (a - c).cross(&(b - c)).dot(&(a + b + c)) > 0.0;
            let corners = if outward { [c, a, b] } else { [c, b, a] };
            Hypersurface::new(SphericalTriangle {
                body: body.clone(),
                corners,
            })
            .with_panels(12)
        })
        .collect())
}

/// Anisotropic area of `∂K ∩ C` with outer normal.
pub fn wulff_cone_perimeter(body: &ConvexBody, cone: &Cone) -> Result<f64> {
    let pieces = wulff_in_cone(body, cone)?;
    if pieces.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    pieces.iter().map(|p| p.anisotropic_area(body)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    #[test]
    fn quarter_disk() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::from_spec(&DomainSpec::PolyhedralCone {
            apex: vec![0.0, 0.0],
            facet_normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        })
        .unwrap();
        let (c, apex) = Cone::from_domain(&d).unwrap();
        assert_eq!(apex, Vec3::zeros());
        let v = cone_body_volume(&b, &c, 0).unwrap().value;
        assert!((v - PI / 4.0).abs() < 1e-13);
        let p = wulff_cone_perimeter(&b, &c).unwrap();
        assert!((p - PI / 2.0).abs() < 1e-12);
        let i = cone_profile(&b, &c, 0.3, 0).unwrap();
        assert!((i - (PI * 0.3).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spatial_full_space_perimeter() {
        let b = ConvexBody::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let p = wulff_cone_perimeter(&b, &Cone::Full { dim: 3 }).unwrap();
        assert!((p - 3.0 * b.volume()).abs() < 1e-8 * p, "{p}");
    }
}
