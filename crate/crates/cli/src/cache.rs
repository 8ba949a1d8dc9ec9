//! Flat-file result cache. One JSON file per key under
//! `$VOLCANO_CACHE_DIR/<version>/`; a miss or an unreadable entry simply
//! recomputes.

use std::fs;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Serialize;

pub const ENV_VAR: &str = "VOLCANO_CACHE_DIR";
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: Some(dir.into().join(CODE_VERSION)) }
    }

    /// `explicit`, else `VOLCANO_CACHE_DIR`, else disabled.
    pub fn from_env(explicit: Option<PathBuf>, no_cache: bool) -> Cache {
        if no_cache {
            return Cache::disabled();
        }
        match explicit.or_else(|| std::env::var_os(ENV_VAR).map(PathBuf::from)) {
            Some(d) => Cache::at(d),
            None => Cache::disabled(),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.dir.is_some()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let bytes = fs::read(self.path(key)?).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Best effort: write failures leave the cache cold.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else { return };
        let Ok(bytes) = serde_json::to_vec(value) else { return };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
        if fs::write(&tmp, bytes).is_ok() && fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }

    pub fn get_or_insert_with<T, E>(&self, key: &str, compute: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(key, &v);
        Ok(v)
    }
}
