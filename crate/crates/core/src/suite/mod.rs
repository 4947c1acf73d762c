//! Acceptance battery: every check carries its measured value, the
//! tolerance it was compared against and where the number came from.

mod geometry;
mod profiles;
mod variations;

pub use geometry::{reference_bodies, stability, wulff_identities};
pub use profiles::{
    anisotropic_profiles, cone_profiles, determinism, random_hexagon, square_ball, square_ball_profile,
    PROFILE_GRID,
};
pub use variations::{
    disk_wulff_arc, index_form_scenes, index_scenes, report_checks, variation_formulas, variation_scenes,
    VariationScene,
};

use crate::error::Result;
use crate::profile::ProfileMode;
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};

/// Origin of a checked number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Analytic,
    Fd,
    Mc,
    Optimizer,
}

/// One gated comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub source: Source,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64, source: Source) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            source,
            pass: value <= tolerance,
        }
    }

    /// Passes when `value ≥ -tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64, source: Source) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            source,
            pass: value >= -tolerance,
        }
    }

    /// Passes when `value > tolerance`.
    pub fn above(name: impl Into<String>, value: f64, tolerance: f64, source: Source) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            source,
            pass: value > tolerance,
        }
    }

    /// A boolean observation recorded as `1` or `0`.
    pub fn flag(name: impl Into<String>, ok: bool, source: Source) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            source,
            pass: ok,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, source: Source) -> Self {
        Check {
            name: name.into(),
            value: f64::NAN,
            tolerance: 0.0,
            source,
            pass: false,
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionResult {
    pub fn new(id: u32, title: &str, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        CriterionResult {
            id,
            title: title.into(),
            pass,
            checks,
            notes: Vec::new(),
        }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    /// The failing checks.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        format!(
            "criterion {}: {} ({}; {} checks, {} failed)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len(),
            failed
        )
    }
}

/// Settings shared by all criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            tolerances: Tolerances::default(),
        }
    }
}

/// Relative gap `|a - b| / scale` with a floor on the scale.
pub(crate) fn rel_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1e-300)
}

/// Runs one criterion by number.
pub fn run_criterion(id: u32, config: &SuiteConfig) -> Result<CriterionResult> {
    match id {
        1 => wulff_identities(config),
        2 => variation_formulas(config),
        3 => index_form_scenes(config),
        4 => cone_profiles(config),
        5 => square_ball(config, ProfileMode::Both),
        6 => anisotropic_profiles(config),
        7 => stability(config),
        8 => determinism(config),
        _ => Err(crate::error::Error::InvalidArgument(format!(
            "unknown criterion {id}"
        ))),
    }
}

/// Identifiers of every acceptance criterion.
pub const CRITERIA: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Every criterion's checks with the settings used; contains no timings,
/// so equal inputs give identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub version: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Runs the given criteria in order.
pub fn run_suite(ids: &[u32], config: &SuiteConfig) -> Result<SuiteSummary> {
    let criteria = ids
        .iter()
        .map(|id| run_criterion(*id, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteSummary {
        version: crate::io::CODE_VERSION.to_string(),
        seed: config.seed,
        tolerances: config.tolerances.clone(),
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    })
}
