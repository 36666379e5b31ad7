//! Self-describing result archives.
//!
//! An archive is deterministic JSON: same config, seed and code version give
//! the same bytes. Wall-clock data goes to a separate run log.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cache::CacheEvent;
use crate::config::RunConfig;
use crate::error::{LabError, Result};

pub const ARCHIVE_FILE: &str = "archive.json";
pub const RUN_LOG_FILE: &str = "run_log.json";

/// Non-finite values are stored as `null` and read back as NaN.
mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| v.is_finite().then_some(*v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Unit or scale, e.g. `E/(omega j)` or `1` for dimensionless counts.
    pub unit: String,
    #[serde(with = "nullable")]
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: &str, unit: &str, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<Column>,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Self {
        let n = columns.first().map_or(0, |c| c.values.len());
        assert!(columns.iter().all(|c| c.values.len() == n), "ragged dataset");
        Dataset {
            columns,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.meta.insert(key.into(), serde_json::to_value(value).expect("meta serializes"));
        self
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMetadata {
    pub pipeline: String,
    pub code_version: String,
    pub format: u32,
    /// sha256 of the canonical TOML rendering of `config`.
    pub config_hash: String,
    pub seed: u64,
    /// Resolved truncation and tolerances, after defaults.
    pub resolved: BTreeMap<String, Value>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultArchive {
    pub metadata: ArchiveMetadata,
    pub datasets: BTreeMap<String, Dataset>,
}

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

pub fn config_hash(config: &RunConfig) -> String {
    Sha256::digest(config.to_toml().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl ResultArchive {
    pub fn new(pipeline: &str, config: &RunConfig) -> Self {
        ResultArchive {
            metadata: ArchiveMetadata {
                pipeline: pipeline.into(),
                code_version: env!("CARGO_PKG_VERSION").into(),
                format: ARCHIVE_FORMAT_VERSION,
                config_hash: config_hash(config),
                seed: config.seed,
                resolved: BTreeMap::new(),
                config: config.clone(),
            },
            datasets: BTreeMap::new(),
        }
    }

    pub fn resolve(&mut self, key: &str, value: impl Serialize) {
        self.metadata
            .resolved
            .insert(key.into(), serde_json::to_value(value).expect("value serializes"));
    }

    pub fn insert(&mut self, name: &str, dataset: Dataset) {
        self.datasets.insert(name.into(), dataset);
    }

    pub fn dataset(&self, name: &str) -> Option<&Dataset> {
        self.datasets.get(name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| LabError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::config(path.display().to_string(), e.to_string()))
    }
}

/// Wall-clock record of one run, kept beside the archive.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunLog {
    pub started_unix: f64,
    pub finished_unix: f64,
    pub threads: usize,
    pub stages: Vec<StageTiming>,
    pub cache: Vec<CacheRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheRecord {
    pub what: String,
    pub event: CacheEvent,
    pub seconds: f64,
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

impl RunLog {
    pub fn stage(&mut self, stage: &str, seconds: f64) {
        self.stages.push(StageTiming {
            stage: stage.into(),
            seconds,
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("log serializes");
        std::fs::write(path, text + "\n").map_err(|e| LabError::io(path, e))
    }
}
