//! Batch driver for the `magel` studies: configuration, experiment dispatch
//! and the `results.csv` / `manifest.json` / VTK outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use magel::grid::write_vtk;
use magel::Error;

pub use config::{Experiment, ExperimentConfig, RawConfig};
pub use experiments::{stray_check, StrayCheck, Table};

/// Process exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validation(_) | Error::Domain(_) | Error::Uncertified { .. } => 2,
        Error::Numeric(_) | Error::Convergence { .. } => 3,
    }
}

#[derive(Debug)]
pub enum RunError {
    Model(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Model(e) => exit_code(e),
            RunError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Model(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Model(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.into())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub snapshots: bool,
    /// Worker threads; the global pool when `None`.
    pub threads: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    library: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
}

/// Files written by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub table: Table,
    pub results: PathBuf,
    pub manifest: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.headers)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `cfg` and writes `results.csv`, `manifest.json` and, if requested,
/// VTK snapshots into `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let outcome = match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Validation(format!("cannot build a pool of {n} threads: {e}")))?;
            pool.install(|| experiments::run(cfg, opts.snapshots))?
        }
        None => experiments::run(cfg, opts.snapshots)?,
    };
    let dir = &cfg.output;
    fs::create_dir_all(dir)?;
    let results = dir.join("results.csv");
    write_csv(&results, &outcome.table)?;
    let manifest = dir.join("manifest.json");
    let m = Manifest { library: "magel", version: env!("CARGO_PKG_VERSION"), config: cfg };
    fs::write(&manifest, serde_json::to_string_pretty(&m).map_err(std::io::Error::from)? + "\n")?;
    let mut snaps = Vec::new();
    for s in &outcome.snapshots {
        let path = dir.join(format!("{}.vtk", s.name));
        let mut w = BufWriter::new(fs::File::create(&path)?);
        write_vtk(&mut w, &s.grid, &s.name, &s.data())?;
        snaps.push(path);
    }
    Ok(RunReport { table: outcome.table, results, manifest, snapshots: snaps })
}

/// Reads a configuration file or a previous `manifest.json`.
pub fn load_config(path: &Path) -> Result<RawConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("invalid JSON in {}: {e}", path.display())))?;
    let body = match value.get("config") {
        Some(c) if value.get("library").is_some() => c.clone(),
        _ => value,
    };
    serde_json::from_value(body).map_err(|e| Error::Validation(format!("invalid configuration {}: {e}", path.display())))
}
