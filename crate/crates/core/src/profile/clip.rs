//! `(p + λK) ∩ Ω` for a planar body and a bounded planar domain.

use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{angle_of, cross2, polar, rot_ccw, wrap_from, Vec3};
use crate::quadrature::CompositeRule;
use crate::roots::brent;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Tolerance for locating clipped endpoints on `∂Ω`.
pub(crate) const EDGE_TOL: f64 = 1e-9;
const DISK_SCAN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipState {
    /// The Wulff boundary crosses `∂Ω`.
    Partial,
    /// `p + λK ⊂ Ω`.
    Inside,
    /// `Ω ⊂ p + λK`.
    ContainsDomain,
    Disjoint,
}

/// A Wulff shape clipped by the domain: free arcs are given by ranges of
/// the outer normal angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ClippedWulff {
    pub center: Vec3,
    pub scale: f64,
    pub state: ClipState,
    pub arcs: Vec<[f64; 2]>,
    pub area: f64,
    /// Anisotropic length of the arcs inside `Ω`.
    pub perimeter: f64,
    /// `max |⟨N_K, ξ⟩|` over arc endpoints.
    pub contact: f64,
}

/// `p + λ π_K(u(θ))` and its `θ`-derivative.
pub(crate) fn wulff_point(body: &ConvexBody, center: &Vec3, scale: f64, t: f64) -> (Vec3, Vec3) {
    let [g, g1, g2, _] = body.circle_jet(t);
    let u = polar(t);
    let up = rot_ccw(&u);
    (center + (u * g + up * g1) * scale, up * ((g + g2) * scale))
}

fn crossings(body: &ConvexBody, domain: &Domain, center: &Vec3, scale: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if let Some((c, r)) = domain.disk_geometry() {
        let f = |t: f64| r - (wulff_point(body, center, scale, t).0 - c).norm();
        let step = TAU / DISK_SCAN as f64;
        let mut prev = f(0.0);
        for i in 1..=DISK_SCAN {
            let (a, b) = ((i - 1) as f64 * step, i as f64 * step);
            let cur = f(b);
            if prev == 0.0 {
                roots.push(a);
            } else if prev * cur < 0.0 {
                if let Some(x) = brent(f, a, b, 1e-15) {
                    roots.push(x);
                }
            }
            prev = cur;
        }
    } else {
        for w in domain.walls() {
            let s0 = w.residual(center);
            let f = |t: f64| {
                let [g, g1, _, _] = body.circle_jet(t);
                let u = polar(t);
                s0 + scale * (u * g + rot_ccw(&u) * g1).dot(&w.normal)
            };
            let tn = angle_of(&w.normal);
            for (a, b) in [(tn, tn + PI), (tn + PI, tn + TAU)] {
                let (fa, fb) = (f(a), f(b));
                if fa * fb < 0.0 {
                    if let Some(x) = brent(f, a, b, 1e-15) {
                        roots.push(wrap_from(x, 0.0));
                    }
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    roots
}

fn arc_integrals(body: &ConvexBody, center: &Vec3, scale: f64, a: f64, b: f64) -> (f64, f64) {
    let panels = (((b - a) / 0.2).ceil() as usize).max(2);
    let rule = CompositeRule::new(a, b, panels);
    let (mut area, mut len) = (0.0, 0.0);
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        let [g, _, g2, _] = body.circle_jet(*t);
        let (x, dx) = wulff_point(body, center, scale, *t);
        area += 0.5 * cross2(&x, &dx) * w;
        len += scale * g * (g + g2) * w;
    }
    (area, len)
}

fn endpoint_contact(domain: &Domain, body: &ConvexBody, center: &Vec3, scale: f64, t: f64) -> f64 {
    let (x, _) = wulff_point(body, center, scale, t);
    let nk = (x - center) / scale;
    if let Some((c, r)) = domain.disk_geometry() {
        return nk.dot(&((c - x) / r)).abs();
    }
    domain
        .walls()
        .iter()
        .filter(|w| w.residual(&x).abs() <= EDGE_TOL * (1.0 + x.norm()))
        .map(|w| nk.dot(&w.normal).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Clip `∂(center + scale·K)` by a bounded planar domain.
pub fn clip_wulff(body: &ConvexBody, domain: &Domain, center: &Vec3, scale: f64) -> Result<ClippedWulff> {
    if body.dim() != 2 || domain.dim() != 2 || !domain.is_bounded() {
        return Err(Error::InvalidArgument(
            "clipping needs a planar body and a bounded planar domain".into(),
        ));
    }
    let roots = crossings(body, domain, center, scale);
    let inside = |t: f64| domain.slack(&wulff_point(body, center, scale, t).0) > 0.0;
    let mut out = ClippedWulff {
        center: *center,
        scale,
        state: ClipState::Partial,
        arcs: Vec::new(),
        area: 0.0,
        perimeter: 0.0,
        contact: 0.0,
    };
    if roots.is_empty() {
        if inside(0.0) {
            out.state = ClipState::Inside;
            out.arcs.push([0.0, TAU]);
            out.area = scale * scale * body.volume();
            out.perimeter = 2.0 * scale * body.volume();
        } else {
            let probe = domain.centroid().expect("bounded domain");
            if body.gauge(&(probe - center)) < scale {
                out.state = ClipState::ContainsDomain;
                out.area = domain.volume().expect("bounded domain");
            } else {
                out.state = ClipState::Disjoint;
            }
        }
        return Ok(out);
    }
    let m = roots.len();
    let mut arcs = Vec::new();
    for i in 0..m {
        let a = roots[i];
        let b = if i + 1 < m { roots[i + 1] } else { roots[0] + TAU };
        if b - a > 0.0 && inside(0.5 * (a + b)) {
            arcs.push([a, b]);
        }
    }
    if arcs.is_empty() {
        // tangential contact only
        let probe = domain.centroid().expect("bounded domain");
        if body.gauge(&(probe - center)) < scale {
            out.state = ClipState::ContainsDomain;
            out.area = domain.volume().expect("bounded domain");
        } else {
            out.state = ClipState::Disjoint;
        }
        return Ok(out);
    }
    let mut area = 0.0;
    let mut perimeter = 0.0;
    let mut contact = 0.0f64;
    let k = arcs.len();
    for i in 0..k {
        let [a, b] = arcs[i];
        let (ar, len) = arc_integrals(body, center, scale, a, b);
        area += ar;
        perimeter += len;
        let end = wulff_point(body, center, scale, b).0;
        let next = wulff_point(body, center, scale, arcs[(i + 1) % k][0]).0;
        area += domain.ccw_wall_integral(&end, &next, 1e3 * EDGE_TOL)?;
        for t in [a, b] {
            contact = contact.max(endpoint_contact(domain, body, center, scale, t));
        }
    }
    out.arcs = arcs;
    out.area = area;
    out.perimeter = perimeter;
    out.contact = contact;
    Ok(out)
}

/// The clipped Wulff shape centered at `center` whose area is `v`.
pub fn wulff_for_volume(body: &ConvexBody, domain: &Domain, center: &Vec3, v: f64) -> Result<ClippedWulff> {
    let total = domain.volume().ok_or_else(|| Error::InvalidDomain("bounded domain expected".into()))?;
    if !(v > 0.0 && v < total) {
        return Err(Error::InvalidArgument(format!("volume {v} outside (0, {total})")));
    }
    let area = |l: f64| clip_wulff(body, domain, center, l).map(|c| c.area - v);
    let mut lo = 0.0;
    let mut hi = (v / body.volume()).sqrt();
    let mut tries = 0;
    loop {
        let f = area(hi)?;
        if f >= 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoFeasibleCandidate(v));
        }
    }
    let f = |l: f64| area(l).unwrap_or(f64::NAN);
    let l = if f(hi) == 0.0 {
        hi
    } else {
        brent(f, lo, hi, 1e-15 * hi).ok_or(Error::NoFeasibleCandidate(v))?
    };
    clip_wulff(body, domain, center, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_disk_in_square() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::unit_square();
        let c = wulff_for_volume(&b, &d, &Vec3::zeros(), 0.1).unwrap();
        let lam = (0.4 / PI).sqrt();
        assert!((c.scale - lam).abs() < 1e-12, "{}", c.scale);
        assert!((c.perimeter - (0.1 * PI).sqrt()).abs() < 1e-12);
        assert!(c.contact < 1e-12);
        assert_eq!(c.arcs.len(), 1);
    }

    #[test]
    fn half_disk_on_edge() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::unit_square();
        let c = clip_wulff(&b, &d, &Vec3::new(0.5, 0.0, 0.0), 0.3).unwrap();
        assert!((c.area - 0.5 * PI * 0.09).abs() < 1e-12);
        assert!((c.perimeter - PI * 0.3).abs() < 1e-12);
        let inside = clip_wulff(&b, &d, &Vec3::new(0.5, 0.5, 0.0), 0.3).unwrap();
        assert_eq!(inside.state, ClipState::Inside);
        let all = clip_wulff(&b, &d, &Vec3::new(0.5, 0.5, 0.0), 2.0).unwrap();
        assert_eq!(all.state, ClipState::ContainsDomain);
        assert!((all.area - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lens_in_disk() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        // unit circle centered at distance √2 meets the boundary orthogonally
        let c = clip_wulff(&b, &d, &Vec3::new(2f64.sqrt(), 0.0, 0.0), 1.0).unwrap();
        assert!(c.contact < 1e-10, "{}", c.contact);
        // lens area: two circular segments of angle π/2
        let seg = 0.5 * (PI / 2.0 - 1.0);
        assert!((c.area - 2.0 * seg).abs() < 1e-10, "{}", c.area);
        assert!((c.perimeter - PI / 2.0).abs() < 1e-10);
    }
}
