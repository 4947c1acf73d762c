//! Scene files: strict JSON documents, one schema per command.

use crate::body::BodySpec;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::profile::{ProfileMode, ProfileOptions};
use crate::surface::SurfaceConfig;
use crate::variation::{FlowMode, OmegaSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyScene {
    pub body: BodySpec,
    /// Directions used for the ellipticity bounds.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceScene {
    pub body: BodySpec,
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationScene {
    pub body: BodySpec,
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    pub omega: OmegaSpec,
    #[serde(default)]
    pub mode: FlowMode,
    /// Also compute second variations and, at stationary free-boundary
    /// surfaces, the index form.
    #[serde(default = "yes")]
    pub second: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Scene for `profile` and `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileScene {
    pub body: BodySpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub volumes: Option<Vec<f64>>,
    /// Uniform grid size, endpoints included.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub method: ProfileMode,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "yes")]
    pub refine: bool,
}

impl ProfileScene {
    pub const DEFAULT_GRID: usize = 21;

    pub fn options(&self, seed: u64) -> ProfileOptions {
        ProfileOptions {
            mode: self.method,
            seed,
            refine: self.refine,
            ..ProfileOptions::default()
        }
    }
}

/// Parses a scene, naming the offending field on failure.
pub fn parse_scene<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            Error::Schema(inner.to_string())
        } else {
            Error::Schema(format!("{path}: {inner}"))
        }
    })
}

pub fn read_scene<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse_scene(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let text = r#"{"body": {"kind": "ball", "dim": 2, "radius": 1, "colour": 3}, "domain": {"kind": "polygon2d", "vertices": [[0,0],[1,0],[1,1],[0,1]]}}"#;
        let err = parse_scene::<ProfileScene>(text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        assert!(err.contains("body"), "{err}");
    }

    #[test]
    fn profile_scene_defaults() {
        let text = r#"{"body": {"kind": "ball", "dim": 2, "radius": 1}, "domain": {"kind": "disk2d", "center": [0,0], "radius": 1}}"#;
        let s: ProfileScene = parse_scene(text).unwrap();
        assert_eq!(s.method, ProfileMode::Both);
        assert!(s.refine);
        assert!(s.volumes.is_none());
    }
}
