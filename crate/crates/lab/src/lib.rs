//! Configuration, orchestration, persistence and plot-data export for the
//! `dicke-core` pipelines.

pub mod archive;
pub mod cache;
pub mod config;
pub mod error;
pub mod export;
pub mod pipelines;

use std::path::{Path, PathBuf};

pub use archive::{ResultArchive, RunLog};
pub use cache::EigenCache;
pub use config::{Pipeline, RunConfig};
pub use error::{LabError, Result};
pub use pipelines::run_pipeline;

/// Environment variable setting the worker-thread count when `--threads` is absent.
pub const THREADS_ENV: &str = "DICKE_LAB_THREADS";

/// Files produced by one invocation.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub archive: PathBuf,
    pub run_log: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Cache selected by the config, `--no-cache` and the cache-root variable.
/// Without the variable the cache lives under the output directory.
pub fn resolve_cache(cfg: &RunConfig, out_root: &Path, no_cache: bool) -> EigenCache {
    if no_cache || !cfg.output.cache {
        return EigenCache::disabled();
    }
    match std::env::var_os(cache::CACHE_ROOT_ENV) {
        Some(root) if !root.is_empty() => EigenCache::new(root),
        _ => EigenCache::new(out_root.join("cache")),
    }
}

/// Runs one pipeline and writes `archive.json`, `run_log.json` and every
/// applicable plot recipe under `<out_root>/<pipeline>/`.
pub fn run_to_dir(pipeline: Pipeline, cfg: &RunConfig, out_root: &Path, cache: &EigenCache) -> Result<RunOutput> {
    if let Some(p) = cfg.pipeline.filter(|&p| p != pipeline) {
        return Err(LabError::config(
            "pipeline",
            format!("config is for `{}` but `{}` was requested", p.name(), pipeline.name()),
        ));
    }
    let (archive, log) = run_pipeline(pipeline, cfg, cache)?;
    let dir = out_root.join(pipeline.name());
    std::fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
    let archive_path = dir.join(archive::ARCHIVE_FILE);
    archive.write(&archive_path)?;
    let log_path = dir.join(archive::RUN_LOG_FILE);
    log.write(&log_path)?;
    let plots = export::applicable(&archive)
        .into_iter()
        .map(|r| export::export_plot_data(&archive, r, &dir.join("plots")))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput {
        dir,
        archive: archive_path,
        run_log: log_path,
        plots,
    })
}
