//! Content-addressed store of computed profiles.

use crate::error::Result;
use crate::profile::ProfileCurve;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Bumped whenever a formula change alters numerical results.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+profiles.1");

pub const CACHE_ENV: &str = "WULFFKIT_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct RunCache {
    dir: PathBuf,
}

impl RunCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        RunCache { dir: dir.into() }
    }

    /// `$WULFFKIT_CACHE_DIR`, else a directory under the system temp dir.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => RunCache::new(d),
            _ => RunCache::new(std::env::temp_dir().join("wulffkit-cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash of the scene, seed and code version.
    pub fn key<S: Serialize>(scene: &S, seed: u64) -> Result<String> {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(scene)?);
        h.update(seed.to_le_bytes());
        h.update(CODE_VERSION.as_bytes());
        Ok(hex::encode(h.finalize()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<ProfileCurve> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, profile: &ProfileCurve) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.json.tmp"));
        std::fs::write(&tmp, serde_json::to_vec(profile)?)?;
        std::fs::rename(tmp, self.path(key))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::profile_csv;
    use crate::profile::{polygon_profile, uniform_grid, ProfileMode, ProfileOptions};
    use crate::{ConvexBody, Domain};

    #[test]
    fn cache_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RunCache::new(dir.path());
        let body = ConvexBody::fourier(2.0, &[0.2, 0.3], &[]).unwrap();
        let domain = Domain::unit_square();
        let opts = ProfileOptions {
            mode: ProfileMode::Candidates,
            refine: false,
            ..ProfileOptions::default()
        };
        let p = polygon_profile(&body, &domain, &uniform_grid(1.0, 6), &opts).unwrap();
        let key = RunCache::key(&("scene", 1), 7).unwrap();
        assert!(cache.get(&key).is_none());
        cache.put(&key, &p).unwrap();
        let q = cache.get(&key).unwrap();
        assert_eq!(profile_csv(&p).unwrap(), profile_csv(&q).unwrap());
        assert_eq!(q, p);
        assert_ne!(key, RunCache::key(&("scene", 1), 8).unwrap());
    }
}
