//! Experiment driver behind the `wcl` binary.

pub mod config;
pub mod output;
pub mod run;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use config::{ExperimentConfig, Task};
use output::{companion_paths, write_atomic, CliError};
use run::{run_task, sidecar, Rendered};

pub const THREADS_ENV: &str = "WCL_THREADS";

/// Worker count: `WCL_THREADS` (default: logical cores), lowered to the
/// config's requested degree when that is smaller.
pub fn thread_count(requested: Option<usize>) -> Result<usize, CliError> {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => cores,
    };
    Ok(requested.unwrap_or(cap).min(cap).max(1))
}

pub fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes the report, its CSV mirror and the metadata sidecar.
pub fn write_report(path: &Path, task: &Task, rendered: &Rendered, threads: usize) -> Result<(), CliError> {
    let (csv_path, meta_path) = companion_paths(path);
    write_atomic(path, &rendered.json)?;
    if let Some(csv) = &rendered.csv {
        write_atomic(&csv_path, csv)?;
    }
    let meta = sidecar(rendered.kind, task, threads, unix_now());
    write_atomic(&meta_path, &wcl_core::report::to_json_string(&meta))
}

/// Runs one task; prints the JSON report when no output path is given.
pub fn run_single(task: &Task, out: Option<&Path>) -> Result<(), CliError> {
    let threads = thread_count(None)?;
    let rendered = in_pool(threads, || run_task(task))??;
    match out {
        Some(p) => write_report(p, task, &rendered, threads),
        None => {
            print!("{}", rendered.json);
            Ok(())
        }
    }
}

/// Runs every task of a config file and returns the written report paths.
///
/// Runs execute concurrently; files are written afterwards in config order.
/// Reports of successful runs are kept when another run fails; the first
/// failure in config order is returned.
pub fn run_config_file(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_config(&cfg, &base)
}

pub fn run_config(cfg: &ExperimentConfig, base: &Path) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let threads = thread_count(cfg.threads)?;
    let results: Vec<_> = in_pool(threads, || cfg.runs.par_iter().map(|r| run_task(&r.task)).collect())?;
    let mut written = Vec::new();
    let mut first_err = None;
    for (run, res) in cfg.runs.iter().zip(results) {
        match res {
            Ok(rendered) => {
                let p = base.join(&run.output);
                write_report(&p, &run.task, &rendered, threads)?;
                written.push(p);
            }
            Err(e) => {
                first_err.get_or_insert(CliError::from(e));
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
