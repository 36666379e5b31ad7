use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dicke_lab::{resolve_cache, run_to_dir, LabError, Pipeline, RunConfig, THREADS_ENV};

/// Dicke-model chaos and thermalization pipelines.
#[derive(Debug, Parser)]
#[command(name = "dicke-lab", version)]
struct Cli {
    pipeline: Pipeline,
    #[arg(long)]
    config: PathBuf,
    /// Output root; overrides `output.dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to the DICKE_LAB_THREADS variable.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    no_cache: bool,
}

fn thread_count(cli: Option<usize>) -> Result<Option<usize>, LabError> {
    if let Some(n) = cli {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| LabError::config(THREADS_ENV, format!("`{v}` is not a thread count"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), LabError> {
    let mut cfg = RunConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(LabError::config("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::config("threads", e.to_string()))?;
    }
    let out_root = cfg.output.dir.clone();
    let cache = resolve_cache(&cfg, &out_root, cli.no_cache);
    let written = run_to_dir(cli.pipeline, &cfg, &out_root, &cache)?;
    log::info!("wrote {} and {} plot files", written.archive.display(), written.plots.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
