//! Relative isoperimetric profiles: exact in cones, numerical upper bounds
//! in planar convex domains.

pub mod candidates;
pub mod clip;
pub mod cone;
pub mod optimizer;
pub mod reports;

pub use candidates::{candidate_oracle, chord_candidate, family_candidates, Candidate, Descriptor};
pub use clip::{clip_wulff, wulff_for_volume, ClipState, ClippedWulff};
pub use cone::{
    cone_body_volume, cone_body_volume_with, cone_profile, cone_profile_value, wulff_cone_perimeter,
    wulff_in_cone, Cone, ConeVolume,
};
pub use optimizer::{optimize_curve, OptimizedCurve, OptimizerConfig};
pub use reports::{
    comparison_report, concavity_report, profile_reports, structure_checks, ComparisonReport,
    ConcavityReport, ProfileReports, StructureReport,
};

use crate::body::{BodySpec, ConvexBody};
use crate::domain::{Domain, DomainSpec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How a profile value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticCone,
    CandidateFamily,
    Optimizer,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AnalyticCone => "analytic_cone",
            Method::CandidateFamily => "candidate_family",
            Method::Optimizer => "optimizer",
        }
    }
}

/// Which numerical routes a planar profile uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    Candidates,
    Optimizer,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub v: f64,
    pub value: f64,
    pub descriptor: Descriptor,
    pub method: Method,
    /// `H_K` of the free boundary, when the competitor has constant curvature.
    pub mean_curvature: Option<f64>,
    pub stationary: bool,
    pub connected: bool,
    /// Inserted near a change of competitor family.
    #[serde(default)]
    pub refined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer_value: Option<f64>,
}

impl ProfileSample {
    fn trivial(v: f64, method: Method) -> Self {
        ProfileSample {
            v,
            value: 0.0,
            descriptor: Descriptor::Trivial,
            method,
            mean_curvature: None,
            stationary: true,
            connected: true,
            refined: false,
            candidate_value: None,
            optimizer_value: None,
        }
    }
}

/// Sampled profile `v ↦ I(v)` with `v` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub body: BodySpec,
    pub domain: DomainSpec,
    /// `n` of the ambient `ℝ^{n+1}`.
    pub n: usize,
    pub total_volume: Option<f64>,
    pub seed: u64,
    pub samples: Vec<ProfileSample>,
    /// Per-volume optimizer failures and convergence warnings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ProfileCurve {
    pub fn volumes(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.v).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    /// `ψ = I^{(n+1)/n}`.
    pub fn psi(&self, value: f64) -> f64 {
        value.powf((self.n + 1) as f64 / self.n as f64)
    }

    /// Samples on the uniform grid, without refinement points.
    pub fn uniform(&self) -> Vec<&ProfileSample> {
        self.samples.iter().filter(|s| !s.refined).collect()
    }

    /// Profile value at a sampled volume.
    pub fn at(&self, v: f64) -> Option<f64> {
        let scale = self.total_volume.unwrap_or(1.0);
        self.samples
            .iter()
            .find(|s| (s.v - v).abs() <= 1e-12 * scale)
            .map(|s| s.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub mode: ProfileMode,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    /// Insert three extra volumes between grid neighbours whose best
    /// competitors belong to different families.
    pub refine: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            mode: ProfileMode::Both,
            seed: 7,
            optimizer: OptimizerConfig::default(),
            refine: true,
        }
    }
}

/// `n` equally spaced volumes in `[0, total]`, endpoints included.
pub fn uniform_grid(total: f64, n: usize) -> Vec<f64> {
    let m = n.max(2) - 1;
    (0..=m)
        .map(|i| if i == m { total } else { total * i as f64 / m as f64 })
        .collect()
}

fn sample_volume(
    body: &ConvexBody,
    domain: &Domain,
    v: f64,
    index: u64,
    options: &ProfileOptions,
    warnings: &mut Vec<String>,
) -> Result<ProfileSample> {
    let total = domain.volume().expect("bounded domain");
    if v <= 0.0 || v >= total {
        return Ok(ProfileSample::trivial(v, Method::CandidateFamily));
    }
    let cands = family_candidates(body, domain, v)?;
    let best = candidates::best_of(cands.clone());
    let mut sample = best.as_ref().map(|c| ProfileSample {
        v,
        value: c.value,
        descriptor: c.descriptor.clone(),
        method: Method::CandidateFamily,
        mean_curvature: Some(c.mean_curvature),
        stationary: c.stationary,
        connected: c.connected,
        refined: false,
        candidate_value: Some(c.value),
        optimizer_value: None,
    });
    if options.mode == ProfileMode::Candidates {
        return sample.ok_or(Error::NoFeasibleCandidate(v));
    }
    let mut seeds: Vec<Candidate> = cands.into_iter().filter(|c| c.curve.is_some()).collect();
    seeds.sort_by(|a, b| a.value.total_cmp(&b.value));
    let stream = options.seed.wrapping_mul(1_000_003).wrapping_add(index);
    match optimize_curve(body, domain, v, &seeds, &options.optimizer, stream) {
        Ok(opt) => {
            let cand_value = sample.as_ref().map(|s| s.value);
            if let Some(cv) = cand_value {
                if cv < opt.value * 0.95 {
                    warnings.push(format!(
                        "v={v}: optimizer value {:.9} exceeds candidate value {cv:.9} by more than 5%",
                        opt.value
                    ));
                }
            }
            let improves = cand_value.is_none_or(|cv| opt.value < cv - 1e-9 * cv.max(1.0));
            if options.mode == ProfileMode::Optimizer || improves {
                sample = Some(ProfileSample {
                    v,
                    value: opt.value,
                    descriptor: opt.descriptor(),
                    method: Method::Optimizer,
                    mean_curvature: None,
                    stationary: false,
                    connected: true,
                    refined: false,
                    candidate_value: cand_value,
                    optimizer_value: Some(opt.value),
                });
            } else if let Some(s) = sample.as_mut() {
                s.optimizer_value = Some(opt.value);
            }
        }
        Err(e) => warnings.push(format!("v={v}: {e}")),
    }
    sample.ok_or(Error::NoFeasibleCandidate(v))
}

/// Numerical profile of a planar convex domain at the given volumes; each
/// value is the least perimeter found and so an upper bound on `I(v)`.
pub fn polygon_profile(
    body: &ConvexBody,
    domain: &Domain,
    volumes: &[f64],
    options: &ProfileOptions,
) -> Result<ProfileCurve> {
    if body.dim() != 2 || domain.dim() != 2 || !domain.is_bounded() {
        return Err(Error::InvalidArgument(
            "numerical profiles need a planar body and a bounded planar domain".into(),
        ));
    }
    let total = domain.volume().expect("bounded domain");
    let mut vols = volumes.to_vec();
    if let Some(v) = vols.iter().find(|v| !(**v >= 0.0 && **v <= total)) {
        return Err(Error::InvalidArgument(format!("volume {v} outside [0, {total}]")));
    }
    vols.sort_by(f64::total_cmp);
    vols.dedup();
    let mut warnings = Vec::new();
    let mut samples = Vec::with_capacity(vols.len());
    for (i, v) in vols.iter().enumerate() {
        samples.push(sample_volume(body, domain, *v, i as u64, options, &mut warnings)?);
    }
    if options.refine {
        let mut extra = Vec::new();
        for (i, w) in samples.windows(2).enumerate() {
            let interior = !matches!(w[0].descriptor, Descriptor::Trivial)
                && !matches!(w[1].descriptor, Descriptor::Trivial);
            if interior && w[0].descriptor.family() != w[1].descriptor.family() {
                for j in 1..4 {
                    let v = w[0].v + (w[1].v - w[0].v) * j as f64 / 4.0;
                    let index = (vols.len() + 3 * i + j) as u64;
                    let mut s = sample_volume(body, domain, v, index, options, &mut warnings)?;
                    s.refined = true;
                    extra.push(s);
                }
            }
        }
        samples.extend(extra);
        samples.sort_by(|a, b| a.v.total_cmp(&b.v));
    }
    Ok(ProfileCurve {
        body: body.spec().clone(),
        domain: domain.spec().clone(),
        n: 1,
        total_volume: Some(total),
        seed: options.seed,
        samples,
        warnings,
    })
}

/// Exact profile of a cone at the given volumes.
pub fn cone_profile_curve(body: &ConvexBody, domain: &Domain, volumes: &[f64], seed: u64) -> Result<ProfileCurve> {
    let (cone, apex) = Cone::from_domain(domain)?;
    if cone.dim() != body.dim() {
        return Err(Error::InvalidArgument("body and cone dimensions differ".into()));
    }
    let theta = cone_body_volume(body, &cone, seed)?;
    let n = body.n();
    let mut vols = volumes.to_vec();
    if let Some(v) = vols.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("volume {v} must be non-negative")));
    }
    vols.sort_by(f64::total_cmp);
    vols.dedup();
    let samples = vols
        .iter()
        .map(|&v| {
            if v == 0.0 {
                return ProfileSample::trivial(v, Method::AnalyticCone);
            }
            let value = cone_profile_value(n, theta.value, v);
            let scale = (v / theta.value).powf(1.0 / (n + 1) as f64);
            ProfileSample {
                v,
                value,
                descriptor: Descriptor::CornerWulff {
                    vertex: 0,
                    center: [apex.x, apex.y],
                    scale,
                },
                method: Method::AnalyticCone,
                mean_curvature: Some(-1.0 / scale),
                stationary: true,
                connected: true,
                refined: false,
                candidate_value: None,
                optimizer_value: None,
            }
        })
        .collect();
    Ok(ProfileCurve {
        body: body.spec().clone(),
        domain: domain.spec().clone(),
        n,
        total_volume: None,
        seed,
        samples,
        warnings: Vec::new(),
    })
}
