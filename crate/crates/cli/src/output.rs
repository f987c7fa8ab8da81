//! Atomic report files and the machine-readable error channel.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;
use wcl_core::Error;

/// Exit-code classes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

/// CLI failure: a library error or an I/O problem with the given paths.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Config(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                Error::Domain(_) | Error::FitDegenerate(_) | Error::Unsupported(_) => EXIT_CONFIG,
                Error::NoConvergence { .. } | Error::RootCount(_) => EXIT_NUMERICAL,
                Error::Capacity { .. } => EXIT_CAPACITY,
            },
        }
    }

    pub fn class(&self) -> &'static str {
        match self.exit_code() {
            EXIT_CONFIG => "config",
            EXIT_NUMERICAL => "numerical",
            _ => "capacity",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Config(m) => m.clone(),
        }
    }

    /// One-line JSON for standard error.
    pub fn to_json(&self) -> String {
        json!({"error": {"class": self.class(), "exit_code": self.exit_code(), "message": self.message()}})
            .to_string()
    }
}

/// Writes `contents` to `path` via a temporary file in the same directory
/// and a rename, so readers never see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `report.json` -> `report.csv`, `report.meta.json`.
pub fn companion_paths(report: &Path) -> (PathBuf, PathBuf) {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    (report.with_file_name(format!("{stem}.csv")), report.with_file_name(format!("{stem}.meta.json")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_classes() {
        assert_eq!(CliError::from(Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::NoConvergence { n: 3, sweeps: 9 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::Capacity { what: "words", required: 10, cap: 1 }).exit_code(), 4);
        let v: serde_json::Value = serde_json::from_str(&CliError::Config("bad".into()).to_json()).unwrap();
        assert_eq!(v["error"]["exit_code"], 2);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
        let (csv, meta) = companion_paths(&p);
        assert!(csv.ends_with("sub/r.csv") && meta.ends_with("sub/r.meta.json"));
    }
}
