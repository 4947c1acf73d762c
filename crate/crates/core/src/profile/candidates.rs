//! Parametric families of competitors for the relative profile of a planar
//! convex domain: clipped Wulff shapes, half-planes cut by chords, and
//! complements of both.

use super::clip::{wulff_for_volume, wulff_point, ClipState, ClippedWulff, EDGE_TOL};
use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{cross2, polar, rot_ccw, Vec3};
use crate::roots::{brent, golden_min};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Contact residual below which a candidate counts as stationary.
pub const STATIONARY_TOL: f64 = 1e-6;
const CHORD_DIRECTIONS: usize = 360;
const EDGE_PLACEMENTS: usize = 12;
const DISK_DIRECTIONS: usize = 36;
const DISK_DISTANCES: [f64; 5] = [1.0, 1.25, 1.6, 2.5, 4.0];

fn xy(p: &Vec3) -> [f64; 2] {
    [p.x, p.y]
}

/// What a profile sample's competitor is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Descriptor {
    /// `v = 0` or `v = V(Ω)`.
    Trivial,
    CornerWulff {
        vertex: usize,
        center: [f64; 2],
        scale: f64,
    },
    /// Centered where the lines of two non-adjacent edges meet.
    LineWulff {
        edges: [usize; 2],
        center: [f64; 2],
        scale: f64,
    },
    EdgeWulff {
        edge: usize,
        offset: f64,
        center: [f64; 2],
        scale: f64,
    },
    /// Centered on or outside a circular boundary.
    BoundaryWulff {
        angle: f64,
        distance: f64,
        center: [f64; 2],
        scale: f64,
    },
    InteriorWulff {
        center: [f64; 2],
        scale: f64,
    },
    Chord {
        normal_angle: f64,
        start: [f64; 2],
        end: [f64; 2],
    },
    /// Free curve found by the optimizer.
    Curve {
        start: [f64; 2],
        end: [f64; 2],
        modes: usize,
    },
    /// `Ω ∖ E` for the inner competitor `E` of the reflected body.
    Complement { inner: Box<Descriptor> },
}

impl Descriptor {
    pub fn family(&self) -> String {
        match self {
            Descriptor::Trivial => "trivial".into(),
            Descriptor::CornerWulff { .. } => "corner_wulff".into(),
            Descriptor::LineWulff { .. } => "line_wulff".into(),
            Descriptor::EdgeWulff { .. } => "edge_wulff".into(),
            Descriptor::BoundaryWulff { .. } => "boundary_wulff".into(),
            Descriptor::InteriorWulff { .. } => "interior_wulff".into(),
            Descriptor::Chord { .. } => "chord".into(),
            Descriptor::Curve { .. } => "curve".into(),
            Descriptor::Complement { inner } => format!("complement({})", inner.family()),
        }
    }

    /// Whether the competitor is a corner Wulff truncation.
    pub fn is_corner_wulff(&self) -> bool {
        matches!(self, Descriptor::CornerWulff { .. })
    }

    /// Compact single-line form for tables.
    pub fn short(&self) -> String {
        let f = |p: &[f64; 2]| format!("({:.6},{:.6})", p[0], p[1]);
        match self {
            Descriptor::Trivial => "trivial".into(),
            Descriptor::CornerWulff { vertex, scale, .. } => {
                format!("corner_wulff(vertex={vertex};scale={scale:.9})")
            }
            Descriptor::LineWulff { edges, center, scale } => format!(
                "line_wulff(edges={}+{};center={};scale={scale:.9})",
                edges[0],
                edges[1],
                f(center)
            ),
            Descriptor::EdgeWulff { edge, offset, scale, .. } => {
                format!("edge_wulff(edge={edge};offset={offset:.6};scale={scale:.9})")
            }
            Descriptor::BoundaryWulff { center, scale, .. } => {
                format!("boundary_wulff(center={};scale={scale:.9})", f(center))
            }
            Descriptor::InteriorWulff { center, scale } => {
                format!("interior_wulff(center={};scale={scale:.9})", f(center))
            }
            Descriptor::Chord { start, end, .. } => format!("chord({}->{})", f(start), f(end)),
            Descriptor::Curve { start, end, modes } => {
                format!("curve({}->{};modes={modes})", f(start), f(end))
            }
            Descriptor::Complement { inner } => format!("complement[{}]", inner.short()),
        }
    }
}

/// A competitor with its anisotropic free perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub value: f64,
    pub volume: f64,
    pub descriptor: Descriptor,
    /// `H_K` of the free boundary with the competitor's outer normal.
    pub mean_curvature: f64,
    /// `max |⟨N_K, ξ⟩|` at free-boundary endpoints.
    pub contact: f64,
    pub stationary: bool,
    pub connected: bool,
    /// Free boundary as a polyline with the competitor on its left, when
    /// it is a single curve between two boundary points.
    #[serde(skip)]
    pub curve: Option<Vec<Vec3>>,
}

fn wulff_candidate(c: &ClippedWulff, descriptor: Descriptor, body: &ConvexBody, v: f64) -> Candidate {
    let single = c.state == ClipState::Partial && c.arcs.len() == 1;
    let curve = single.then(|| {
        let [a, b] = c.arcs[0];
        (0..=128)
            .map(|i| wulff_point(body, &c.center, c.scale, a + (b - a) * i as f64 / 128.0).0)
            .collect()
    });
    Candidate {
        value: c.perimeter,
        volume: v,
        descriptor,
        mean_curvature: -1.0 / c.scale,
        contact: c.contact,
        stationary: c.contact <= STATIONARY_TOL,
        connected: true,
        curve,
    }
}

fn corner_descriptor(k: usize, c: &ClippedWulff) -> Descriptor {
    Descriptor::CornerWulff {
        vertex: k,
        center: xy(&c.center),
        scale: c.scale,
    }
}

fn line_intersection(p: &Vec3, d: &Vec3, q: &Vec3, e: &Vec3) -> Option<Vec3> {
    let den = cross2(d, e);
    if den.abs() < 1e-12 * d.norm() * e.norm() {
        return None;
    }
    let t = cross2(&(q - p), e) / den;
    Some(p + d * t)
}

/// `Ω ∩ {⟨x, N⟩ ≤ c}` for a polygon: area and the chord endpoints.
fn polygon_cut(vertices: &[Vec3], normal: &Vec3, c: f64) -> (f64, Vec<Vec3>) {
    let m = vertices.len();
    let mut poly = Vec::with_capacity(m + 2);
    let mut cut = Vec::new();
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let (fa, fb) = (normal.dot(&a) - c, normal.dot(&b) - c);
        if fa <= 0.0 {
            poly.push(a);
        }
        if fa == 0.0 {
            cut.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let x = a + (b - a) * (fa / (fa - fb));
            poly.push(x);
            cut.push(x);
        }
    }
    let n = poly.len();
    let area = 0.5 * (0..n).map(|i| cross2(&poly[i], &poly[(i + 1) % n])).sum::<f64>();
    (area, cut)
}

fn chord_contact(domain: &Domain, body: &ConvexBody, normal: &Vec3, ends: &[Vec3; 2]) -> f64 {
    let nk = body.grad(normal);
    let mut worst = 0.0f64;
    for x in ends {
        let r = if let Some((c, rad)) = domain.disk_geometry() {
            nk.dot(&((c - x) / rad)).abs()
        } else {
            domain
                .walls()
                .iter()
                .filter(|w| w.residual(x).abs() <= EDGE_TOL * (1.0 + x.norm()))
                .map(|w| nk.dot(&w.normal).abs())
                .fold(f64::INFINITY, f64::min)
        };
        worst = worst.max(r);
    }
    worst
}

/// The half-plane competitor of area `v` whose outer normal has angle `beta`.
pub fn chord_candidate(body: &ConvexBody, domain: &Domain, beta: f64, v: f64) -> Result<Candidate> {
    let n = polar(beta);
    let t = rot_ccw(&n);
    let ends = if let Some((ctr, r)) = domain.disk_geometry() {
        let area = |d: f64| {
            let d = d.clamp(-r, r);
            r * r * (-d / r).acos() + d * (r * r - d * d).sqrt() - v
        };
        let d = brent(area, -r, r, 1e-15 * r).ok_or(Error::NoFeasibleCandidate(v))?;
        let half = (r * r - d * d).max(0.0).sqrt();
        let mid = ctr + n * d;
        [mid - t * half, mid + t * half]
    } else {
        let vs = domain.vertices();
        let lo = vs.iter().map(|p| n.dot(p)).fold(f64::INFINITY, f64::min);
        let hi = vs.iter().map(|p| n.dot(p)).fold(f64::NEG_INFINITY, f64::max);
        let c = brent(|c| polygon_cut(vs, &n, c).0 - v, lo, hi, 1e-15 * (hi - lo))
            .ok_or(Error::NoFeasibleCandidate(v))?;
        let (_, cut) = polygon_cut(vs, &n, c);
        if cut.len() != 2 {
            return Err(Error::NoFeasibleCandidate(v));
        }
        let (a, b) = (cut[0], cut[1]);
        if t.dot(&(b - a)) >= 0.0 {
            [a, b]
        } else {
            [b, a]
        }
    };
    let len = (ends[1] - ends[0]).norm();
    let contact = chord_contact(domain, body, &n, &ends);
    Ok(Candidate {
        value: body.h(&n) * len,
        volume: v,
        descriptor: Descriptor::Chord {
            normal_angle: beta,
            start: xy(&ends[0]),
            end: xy(&ends[1]),
        },
        mean_curvature: 0.0,
        contact,
        stationary: contact <= STATIONARY_TOL,
        connected: true,
        curve: Some(
            (0..=16)
                .map(|i| ends[0] + (ends[1] - ends[0]) * (i as f64 / 16.0))
                .collect(),
        ),
    })
}

fn better(a: &Option<Candidate>, b: &Candidate) -> bool {
    match a {
        None => true,
        Some(a) => b.value < a.value * (1.0 - 1e-13),
    }
}

fn keep(best: &mut Option<Candidate>, c: Candidate) {
    if better(best, &c) {
        *best = Some(c);
    }
}

fn best_chord(body: &ConvexBody, domain: &Domain, v: f64) -> Option<Candidate> {
    let step = TAU / CHORD_DIRECTIONS as f64;
    let vals: Vec<(f64, f64)> = (0..CHORD_DIRECTIONS)
        .map(|i| {
            let b = i as f64 * step;
            (b, chord_candidate(body, domain, b, v).map_or(f64::INFINITY, |c| c.value))
        })
        .collect();
    let mut order: Vec<usize> = (0..vals.len()).filter(|i| vals[*i].1.is_finite()).collect();
    order.sort_by(|a, b| vals[*a].1.total_cmp(&vals[*b].1));
    let mut best: Option<Candidate> = None;
    for &i in order.iter().take(4) {
        let b0 = vals[i].0;
        let f = |b: f64| chord_candidate(body, domain, b, v).map_or(f64::INFINITY, |c| c.value);
        let (b, _) = golden_min(f, b0 - step, b0 + step, 60);
        for beta in [b0, b] {
            if let Ok(c) = chord_candidate(body, domain, beta, v) {
                keep(&mut best, c);
            }
        }
    }
    best
}

/// Best competitor per family for area `v` and the body itself (no complements).
fn direct_families(body: &ConvexBody, domain: &Domain, v: f64) -> Vec<Candidate> {
    let mut fam: Vec<Option<Candidate>> = vec![None; 6];
    let mut try_wulff = |slot: usize, center: Vec3, desc: &dyn Fn(&ClippedWulff) -> Descriptor| {
        if let Ok(c) = wulff_for_volume(body, domain, &center, v) {
            if c.state == ClipState::Disjoint || c.state == ClipState::ContainsDomain {
                return;
            }
            let cand = wulff_candidate(&c, desc(&c), body, v);
            keep(&mut fam[slot], cand);
        }
    };
    let vs = domain.vertices().to_vec();
    let m = vs.len();
    for (k, p) in vs.iter().enumerate() {
        try_wulff(0, *p, &|c| corner_descriptor(k, c));
    }
    for i in 0..m {
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (a, b) = (vs[i], vs[(i + 1) % m]);
            let (c, d) = (vs[j], vs[(j + 1) % m]);
            if let Some(p) = line_intersection(&a, &(b - a), &c, &(d - c)) {
                try_wulff(1, p, &|cw| Descriptor::LineWulff {
                    edges: [i, j],
                    center: xy(&p),
                    scale: cw.scale,
                });
            }
        }
    }
    for i in 0..m {
        let (a, b) = (vs[i], vs[(i + 1) % m]);
        for j in 0..EDGE_PLACEMENTS {
            let t = (j as f64 + 0.5) / EDGE_PLACEMENTS as f64;
            try_wulff(2, a + (b - a) * t, &|cw| Descriptor::EdgeWulff {
                edge: i,
                offset: t,
                center: xy(&cw.center),
                scale: cw.scale,
            });
        }
    }
    if let Some((ctr, r)) = domain.disk_geometry() {
        let place = |a: f64, d: f64| ctr + polar(a) * (d * r);
        let value = |a: f64, d: f64| {
            wulff_for_volume(body, domain, &place(a, d), v)
                .ok()
                .filter(|c| c.state == ClipState::Partial)
                .map_or(f64::INFINITY, |c| c.perimeter)
        };
        let mut grid = Vec::new();
        for i in 0..DISK_DIRECTIONS {
            let a = TAU * i as f64 / DISK_DIRECTIONS as f64;
            for d in DISK_DISTANCES {
                grid.push((value(a, d), a, d));
            }
        }
        grid.sort_by(|x, y| x.0.total_cmp(&y.0));
        let step = TAU / DISK_DIRECTIONS as f64;
        for &(_, a0, d0) in grid.iter().take(3) {
            let (mut a, mut d) = (a0, d0);
            for _ in 0..3 {
                a = golden_min(|x| value(x, d), a - step, a + step, 40).0;
                d = golden_min(|y| value(a, y), (d * 0.7).max(1.0), d * 1.4, 40).0;
            }
            for (aa, dd) in [(a0, d0), (a, d)] {
                try_wulff(3, place(aa, dd), &|cw| Descriptor::BoundaryWulff {
                    angle: aa,
                    distance: dd,
                    center: xy(&cw.center),
                    scale: cw.scale,
                });
            }
        }
    }
    if let Some(c) = domain.centroid() {
        try_wulff(4, c, &|cw| Descriptor::InteriorWulff {
            center: xy(&cw.center),
            scale: cw.scale,
        });
    }
    drop(try_wulff);
    fam[5] = best_chord(body, domain, v);
    fam.into_iter().flatten().collect()
}

fn complement(c: Candidate, total: f64) -> Candidate {
    // removing a clipped Wulff shape with several free arcs disconnects Ω
    let connected = c.curve.is_some() || matches!(c.descriptor, Descriptor::InteriorWulff { .. });
    Candidate {
        value: c.value,
        volume: total - c.volume,
        mean_curvature: -c.mean_curvature,
        contact: c.contact,
        stationary: c.stationary,
        connected,
        curve: c.curve.map(|mut p| {
            p.reverse();
            p
        }),
        descriptor: Descriptor::Complement {
            inner: Box::new(c.descriptor),
        },
    }
}

/// Every family's best competitor at area `v`, complements included, in a
/// fixed order.
pub fn family_candidates(body: &ConvexBody, domain: &Domain, v: f64) -> Result<Vec<Candidate>> {
    if body.dim() != 2 || domain.dim() != 2 || !domain.is_bounded() {
        return Err(Error::InvalidArgument(
            "candidate families need a planar body and a bounded planar domain".into(),
        ));
    }
    let total = domain.volume().expect("bounded domain");
    if !(v > 0.0 && v < total) {
        return Err(Error::InvalidArgument(format!("volume {v} outside (0, {total})")));
    }
    let mut out = direct_families(body, domain, v);
    let reflected = body.reflected();
    out.extend(
        direct_families(&reflected, domain, total - v)
            .into_iter()
            .map(|c| complement(c, total)),
    );
    Ok(out)
}

/// The least perimeter over all candidate families.
pub fn candidate_oracle(body: &ConvexBody, domain: &Domain, v: f64) -> Result<Candidate> {
    best_of(family_candidates(body, domain, v)?).ok_or(Error::NoFeasibleCandidate(v))
}

pub(crate) fn best_of(cands: Vec<Candidate>) -> Option<Candidate> {
    let mut best = None;
    for c in cands {
        keep(&mut best, c);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    use std::f64::consts::PI;

    #[test]
    fn square_ball_reference_values() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::unit_square();
        let c = candidate_oracle(&b, &d, 0.1).unwrap();
        assert!((c.value - (0.1 * PI).sqrt()).abs() < 1e-12, "{c:?}");
        assert!(c.descriptor.is_corner_wulff());
        assert!(c.stationary);
        let c = candidate_oracle(&b, &d, 0.5).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12, "{c:?}");
        assert_eq!(c.mean_curvature, 0.0);
        let c = candidate_oracle(&b, &d, 0.9).unwrap();
        assert!((c.value - (0.1 * PI).sqrt()).abs() < 1e-12, "{c:?}");
        assert!(matches!(c.descriptor, Descriptor::Complement { .. }));
        assert!(c.mean_curvature > 0.0);
    }

    #[test]
    fn disk_chord_through_center() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let c = chord_candidate(&b, &d, 0.3, 0.5 * PI).unwrap();
        assert!((c.value - 2.0).abs() < 1e-12);
        assert!(c.stationary);
    }
}
