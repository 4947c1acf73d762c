//! Theorem-shaped checks on a sampled profile.

use super::cone::{cone_body_volume, cone_profile_value, Cone};
use super::{Method, ProfileCurve, ProfileSample};
use crate::body::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::polar;
use crate::suite::{Check, Source};
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Boundary points of a disk at which support half-planes are compared.
const DISK_SUPPORT_POINTS: usize = 72;

fn source_of(s: &ProfileSample) -> Source {
    match s.method {
        Method::Optimizer => Source::Optimizer,
        _ => Source::Analytic,
    }
}

fn worst_source<'a>(samples: impl IntoIterator<Item = &'a ProfileSample>) -> Source {
    if samples.into_iter().any(|s| s.method == Method::Optimizer) {
        Source::Optimizer
    } else {
        Source::Analytic
    }
}

fn interior(profile: &ProfileCurve, s: &ProfileSample) -> bool {
    s.v > 0.0 && profile.total_volume.is_none_or(|t| s.v < t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    /// `(v, ψ(v-h) - 2ψ(v) + ψ(v+h))` on the uniform grid.
    pub second_differences: Vec<[f64; 2]>,
    pub max_second_difference: f64,
    pub tolerance: f64,
    /// Largest amount by which `I` falls below a chord through two other
    /// samples, over all samples.
    pub max_chord_violation: f64,
    pub chord_violations: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Discrete concavity of `ψ = I^{(n+1)/n}` on the uniform samples, with
/// allowance `concavity_rel · ψ(V/2)`.
pub fn concavity_report(profile: &ProfileCurve, tol: &Tolerances) -> Result<ConcavityReport> {
    let uni = profile.uniform();
    if uni.len() < 5 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            got: uni.len(),
        });
    }
    let h0 = uni[1].v - uni[0].v;
    if uni.windows(2).any(|w| ((w[1].v - w[0].v) - h0).abs() > 1e-9 * h0) {
        return Err(Error::InvalidArgument("concavity needs a uniform volume grid".into()));
    }
    let psi: Vec<f64> = uni.iter().map(|s| profile.psi(s.value)).collect();
    let mid = profile.total_volume.unwrap_or(uni[uni.len() - 1].v) / 2.0;
    let psi_mid = {
        let i = uni.iter().position(|s| s.v >= mid).unwrap_or(uni.len() - 1).max(1);
        let (a, b) = (uni[i - 1], uni[i]);
        let t = ((mid - a.v) / (b.v - a.v)).clamp(0.0, 1.0);
        psi[i - 1] + t * (psi[i] - psi[i - 1])
    };
    let tolerance = tol.get("concavity_rel") * psi_mid;
    let second: Vec<[f64; 2]> = (1..uni.len() - 1)
        .map(|i| [uni[i].v, psi[i - 1] - 2.0 * psi[i] + psi[i + 1]])
        .collect();
    let max_second = second.iter().map(|d| d[1]).fold(f64::NEG_INFINITY, f64::max);
    let all = &profile.samples;
    let mut max_chord = f64::NEG_INFINITY;
    let mut violations = 0;
    for i in 0..all.len() {
        for k in i + 2..all.len() {
            let (a, c) = (&all[i], &all[k]);
            for b in &all[i + 1..k] {
                let t = (b.v - a.v) / (c.v - a.v);
                let chord = a.value + t * (c.value - a.value);
                let gap = chord - b.value;
                max_chord = max_chord.max(gap);
                if gap > tolerance {
                    violations += 1;
                }
            }
        }
    }
    let checks = vec![Check::at_most(
        "max second difference of psi",
        max_second,
        tolerance,
        worst_source(uni.iter().copied()),
    )];
    let pass = checks.iter().all(|c| c.pass);
    Ok(ConcavityReport {
        second_differences: second,
        max_second_difference: max_second,
        tolerance,
        max_chord_violation: max_chord,
        chord_violations: violations,
        checks,
        pass,
    })
}

/// One support cone and its worst comparison against the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeBound {
    pub label: String,
    pub point: [f64; 2],
    /// `V(K ∩ (C_p - p))`.
    pub theta: f64,
    /// `max_v (I(v) - I_C(v))`.
    pub max_excess: f64,
    /// `min_v (I_C(v) - I(v))` over interior samples.
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightSample {
    pub v: f64,
    pub gap: f64,
    pub corner_wulff: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub vertices: Vec<ConeBound>,
    pub half_planes: Vec<ConeBound>,
    /// Least `θ(p)` over vertices, giving the best cone bound.
    pub best_theta: Option<f64>,
    /// Samples where the best cone bound is attained up to `tightness`.
    pub tight: Vec<TightSample>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn bound_for(profile: &ProfileCurve, label: String, point: [f64; 2], theta: f64) -> ConeBound {
    let n = profile.n;
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    for s in &profile.samples {
        let b = cone_profile_value(n, theta, s.v);
        max_excess = max_excess.max(s.value - b);
        if interior(profile, s) {
            min_gap = min_gap.min(b - s.value);
        }
    }
    ConeBound {
        label,
        point,
        theta,
        max_excess,
        min_gap,
    }
}

/// Support-cone comparisons for a planar domain: every vertex cone bounds
/// the profile from above, and support half-planes do so strictly.
pub fn comparison_report(
    profile: &ProfileCurve,
    body: &ConvexBody,
    domain: &Domain,
    seed: u64,
    tol: &Tolerances,
) -> Result<ComparisonReport> {
    if domain.dim() != 2 || !domain.is_bounded() {
        return Err(Error::InvalidArgument("comparison needs a bounded planar domain".into()));
    }
    let eps = tol.get("comparison");
    let tight_tol = tol.get("tightness");
    let src = worst_source(&profile.samples);
    let mut vertices = Vec::new();
    let mut half_planes = Vec::new();
    for (k, p) in domain.vertices().iter().enumerate() {
        let cone = Cone::polygon_corner(domain, k)?;
        let theta = cone_body_volume(body, &cone, seed)?.value;
        vertices.push(bound_for(profile, format!("vertex {k}"), [p.x, p.y], theta));
    }
    if domain.is_polygon() {
        for (k, w) in domain.walls().iter().enumerate() {
            let theta = cone_body_volume(body, &Cone::half_plane(&w.normal), seed)?.value;
            let vs = domain.vertices();
            let mid = (vs[k] + vs[(k + 1) % vs.len()]) / 2.0;
            half_planes.push(bound_for(profile, format!("edge {k}"), [mid.x, mid.y], theta));
        }
    } else if let Some((c, r)) = domain.disk_geometry() {
        for i in 0..DISK_SUPPORT_POINTS {
            let u = polar(TAU * i as f64 / DISK_SUPPORT_POINTS as f64);
            let p = c + u * r;
            let theta = cone_body_volume(body, &Cone::half_plane(&(-u)), seed)?.value;
            half_planes.push(bound_for(profile, format!("boundary point {i}"), [p.x, p.y], theta));
        }
    }
    let mut checks = Vec::new();
    for b in &vertices {
        checks.push(Check::at_most(
            format!("{} cone bound excess", b.label),
            b.max_excess,
            eps,
            src,
        ));
    }
    for b in &half_planes {
        checks.push(Check::above(
            format!("{} half-plane strict gap", b.label),
            b.min_gap,
            eps,
            src,
        ));
    }
    let best_theta = vertices.iter().map(|b| b.theta).reduce(f64::min);
    let mut tight = Vec::new();
    if let Some(theta) = best_theta {
        for s in profile.samples.iter().filter(|s| interior(profile, s)) {
            let gap = cone_profile_value(profile.n, theta, s.v) - s.value;
            if gap <= tight_tol {
                tight.push(TightSample {
                    v: s.v,
                    gap,
                    corner_wulff: s.descriptor.is_corner_wulff(),
                });
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ComparisonReport {
        vertices,
        half_planes,
        best_theta,
        tight,
        checks,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeBracket {
    pub v: f64,
    pub left: f64,
    /// `-n H_K` of the competitor's free boundary.
    pub slope: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `min (I(v₁) + I(v₂) - I(v₁ + v₂))` over uniform sample pairs.
    pub subadditivity_margin: f64,
    pub pairs: usize,
    pub symmetric: bool,
    pub monotone_drop: Option<f64>,
    pub symmetry_gap: Option<f64>,
    pub slopes: Vec<SlopeBracket>,
    /// `(α, β)` from the extremes of `h_K` on the unit sphere.
    pub sandwich: Option<[f64; 2]>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Subadditivity, monotonicity and symmetry (centrally symmetric bodies),
/// slope brackets at stationary candidate samples, and the sandwich against
/// a Euclidean profile of the same domain when one is given.
pub fn structure_checks(
    profile: &ProfileCurve,
    body: &ConvexBody,
    euclidean: Option<&ProfileCurve>,
    tol: &Tolerances,
) -> Result<StructureReport> {
    let uni = profile.uniform();
    if uni.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: uni.len(),
        });
    }
    let src = worst_source(&profile.samples);
    let total = profile.total_volume;
    let mut checks = Vec::new();

    let mut margin = f64::INFINITY;
    let mut pairs = 0;
    for i in 1..uni.len() {
        for j in i..uni.len() {
            if i + j >= uni.len() {
                break;
            }
            let sum = &uni[i + j];
            if (sum.v - (uni[i].v + uni[j].v)).abs() > 1e-9 * sum.v.max(1e-300) {
                continue;
            }
            margin = margin.min(uni[i].value + uni[j].value - sum.value);
            pairs += 1;
        }
    }
    checks.push(Check::above("strict subadditivity margin", margin, 0.0, src));

    let symmetric = body.is_centrally_symmetric() && total.is_some();
    let (mut monotone_drop, mut symmetry_gap) = (None, None);
    if let (true, Some(t)) = (symmetric, total) {
        let half: Vec<&ProfileSample> = profile.samples.iter().filter(|s| s.v <= t / 2.0 + 1e-12 * t).collect();
        let drop = half
            .windows(2)
            .map(|w| w[0].value - w[1].value)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::at_most("monotone on the first half (largest drop)", drop, tol.get("monotone"), src));
        monotone_drop = Some(drop);
        let mut gap = 0.0f64;
        for s in &uni {
            if let Some(m) = uni.iter().find(|m| (m.v - (t - s.v)).abs() <= 1e-9 * t) {
                gap = gap.max((s.value - m.value).abs());
            }
        }
        checks.push(Check::at_most("complement symmetry", gap, tol.get("symmetry"), src));
        symmetry_gap = Some(gap);
    }

    let n = profile.n as f64;
    let slope_tol = tol.get("slope");
    let all = &profile.samples;
    let mut slopes = Vec::new();
    for i in 1..all.len().saturating_sub(1) {
        let s = &all[i];
        if s.method != Method::CandidateFamily || !s.stationary || !interior(profile, s) {
            continue;
        }
        let Some(h) = s.mean_curvature else { continue };
        let left = (s.value - all[i - 1].value) / (s.v - all[i - 1].v);
        let right = (all[i + 1].value - s.value) / (all[i + 1].v - s.v);
        let slope = -n * h;
        checks.push(Check::at_least(
            format!("left quotient minus slope at v={}", s.v),
            left - slope,
            slope_tol,
            source_of(s),
        ));
        checks.push(Check::at_least(
            format!("slope minus right quotient at v={}", s.v),
            slope - right,
            slope_tol,
            source_of(s),
        ));
        slopes.push(SlopeBracket {
            v: s.v,
            left,
            slope,
            right,
        });
    }

    let mut sandwich = None;
    if let Some(e) = euclidean {
        let (alpha, beta) = body.support_extremes();
        let eps = tol.get("comparison");
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in all.iter().filter(|s| interior(profile, s)) {
            if let Some(ie) = e.at(s.v) {
                lo = lo.max(alpha * ie - s.value);
                hi = hi.max(s.value - beta * ie);
            }
        }
        if lo.is_finite() {
            let esrc = worst_source(all.iter().chain(&e.samples));
            checks.push(Check::at_most("sandwich lower (alpha I_euclid - I)", lo, eps, esrc));
            checks.push(Check::at_most("sandwich upper (I - beta I_euclid)", hi, eps, esrc));
        }
        sandwich = Some([alpha, beta]);
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(StructureReport {
        subadditivity_margin: margin,
        pairs,
        symmetric,
        monotone_drop,
        symmetry_gap,
        slopes,
        sandwich,
        checks,
        pass,
    })
}

/// Every report that applies to a profile, with the gated verdicts collected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReports {
    pub concavity: Option<ConcavityReport>,
    pub comparison: Option<ComparisonReport>,
    pub structure: Option<StructureReport>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Concavity, the cone comparison (bounded planar domains) and structure
/// checks, gathered into one verdict.
pub fn profile_reports(
    profile: &ProfileCurve,
    body: &ConvexBody,
    domain: &Domain,
    euclidean: Option<&ProfileCurve>,
    tol: &Tolerances,
) -> Result<ProfileReports> {
    let mut notes = Vec::new();
    let mut checks = Vec::new();
    let concavity = match concavity_report(profile, tol) {
        Ok(r) => Some(r),
        Err(Error::InsufficientSamples { needed, got }) => {
            notes.push(format!("concavity skipped: {got} uniform samples, need {needed}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(r) = &concavity {
        checks.extend(r.checks.iter().cloned());
    }
    let comparison = if domain.dim() == 2 && domain.is_bounded() {
        Some(comparison_report(profile, body, domain, profile.seed, tol)?)
    } else {
        notes.push("comparison skipped: domain is not a bounded planar domain".into());
        None
    };
    if let Some(r) = &comparison {
        checks.extend(r.checks.iter().cloned());
    }
    let structure = match structure_checks(profile, body, euclidean, tol) {
        Ok(r) => Some(r),
        Err(Error::InsufficientSamples { needed, got }) => {
            notes.push(format!("structure skipped: {got} uniform samples, need {needed}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(r) = &structure {
        checks.extend(r.checks.iter().cloned());
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ProfileReports {
        concavity,
        comparison,
        structure,
        notes,
        checks,
        pass,
    })
}
