//! Scene parsing, tables, plots and the run cache.

pub mod cache;
pub mod scene;
pub mod svg;
pub mod table;

pub use cache::{RunCache, CODE_VERSION};
pub use scene::{parse_scene, read_scene, BodyScene, ProfileScene, SurfaceScene, VariationScene};
pub use svg::{profile_svg, Overlay};
pub use table::{flow_csv, profile_csv, surface_csv};

use crate::error::Result;
use serde::Serialize;
use std::path::Path;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Single writer for a run directory.
#[derive(Debug)]
pub struct RunWriter<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> RunWriter<'a> {
    pub fn new(dir: &'a Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(RunWriter {
            dir,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}
