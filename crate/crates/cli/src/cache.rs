use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use apery::linform::LevelPipeline;
use apery::qseries::QSeries;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{CliError, Result};

/// Written into every entry; entries with any other stamp are recomputed.
pub const CACHE_VERSION: &str = concat!("apery-cache/1 apery-cli/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub kind: &'static str,
    pub level: u64,
    /// `None` for artifacts covering the whole family.
    pub alpha: Option<String>,
    pub order: usize,
}

impl CacheKey {
    pub fn pipeline(level: u64, order: usize) -> Self {
        CacheKey {
            kind: "pipeline",
            level,
            alpha: None,
            order,
        }
    }

    pub fn canonical(&self) -> String {
        format!(
            "{}/level={}/alpha={}/order={}",
            self.kind,
            self.level,
            self.alpha.as_deref().unwrap_or("*"),
            self.order
        )
    }

    pub fn file_name(&self) -> String {
        let alpha = match &self.alpha {
            None => "all".to_string(),
            Some(a) => a.replace('/', "_").replace('-', "m"),
        };
        format!("{}-{}-{}-{}.json", self.kind, self.level, alpha, self.order)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    payload: Value,
}

#[derive(Debug, Clone, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    verify: bool,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>, verify: bool) -> Self {
        Cache { dir, verify }
    }

    pub fn disabled() -> Self {
        Cache::default()
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(key.file_name()))
    }

    /// All four t-series of a level, from the cache when possible.
    pub fn pipeline(&self, level: u64, order: usize) -> Result<LevelPipeline> {
        let key = CacheKey::pipeline(level, order);
        let mut fresh = None;
        let parts: Vec<QSeries> = self.get_or_compute(&key, || {
            let p = LevelPipeline::new(level, order)?;
            let parts = p.parts().map(QSeries::clone).to_vec();
            fresh = Some(p);
            Ok(parts)
        })?;
        if let Some(p) = fresh {
            return Ok(p);
        }
        let parts: [QSeries; 4] = parts.try_into().map_err(|v: Vec<QSeries>| CliError::Cache {
            key: key.canonical(),
            reason: format!("expected 4 series, found {}", v.len()),
        })?;
        LevelPipeline::from_parts(level, order, parts).map_err(|e| CliError::Cache {
            key: key.canonical(),
            reason: e.to_string(),
        })
    }

    pub fn get_or_compute<T, F>(&self, key: &CacheKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let Some(path) = self.path_for(key) else {
            return compute();
        };
        let stored = read_entry(&path, key)?;
        if self.verify {
            let value = compute()?;
            let payload = serde_json::to_value(&value)?;
            if let Some(stored) = stored {
                if stored != payload {
                    return Err(CliError::Cache {
                        key: key.canonical(),
                        reason: format!("stored payload in {} differs from recomputation", path.display()),
                    });
                }
            } else {
                write_entry(&path, key, payload)?;
            }
            return Ok(value);
        }
        if let Some(stored) = stored {
            if let Ok(value) = serde_json::from_value(stored) {
                return Ok(value);
            }
        }
        let value = compute()?;
        write_entry(&path, key, serde_json::to_value(&value)?)?;
        Ok(value)
    }
}

/// The stored payload, or `None` when the entry is missing or stale. An
/// unparseable entry comes back as `Null`, which never matches a payload.
fn read_entry(path: &Path, key: &CacheKey) -> Result<Option<Value>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::io(path, e)),
    };
    let Ok(entry) = serde_json::from_str::<Entry>(&text) else {
        return Ok(Some(Value::Null));
    };
    if entry.version != CACHE_VERSION || entry.key != key.canonical() {
        return Ok(None);
    }
    Ok(Some(entry.payload))
}

fn write_entry(path: &Path, key: &CacheKey, payload: Value) -> Result<()> {
    let dir = path.parent().expect("cache entries live in a directory");
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let entry = Entry {
        version: CACHE_VERSION.to_string(),
        key: key.canonical(),
        payload,
    };
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        key.file_name(),
        std::process::id()
    ));
    let mut file = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    serde_json::to_writer(&mut file, &entry)?;
    file.write_all(b"\n").map_err(|e| CliError::io(&tmp, e))?;
    file.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
