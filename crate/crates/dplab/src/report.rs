//! Run reports and the output directory they are written to.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// A number together with the module that produced it and the tolerance
/// it carries (`None` for closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub module: &'static str,
    pub tolerance: Option<f64>,
}

impl Quantity {
    pub fn exact(module: &'static str, value: f64) -> Self {
        Quantity { value, module, tolerance: None }
    }

    pub fn approx(module: &'static str, value: f64, tolerance: f64) -> Self {
        Quantity { value, module, tolerance: Some(tolerance) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: u64,
    pub tolerances: BTreeMap<&'static str, f64>,
}

impl Provenance {
    pub fn new(seed: u64, tolerances: &[(&'static str, f64)]) -> Self {
        Provenance { version: env!("CARGO_PKG_VERSION"), seed, tolerances: tolerances.iter().copied().collect() }
    }
}

/// Canonical JSON report of one command. Wall time is kept out of it so
/// that identical inputs give identical bytes; see [`Timing`].
#[derive(Debug, Clone, Serialize)]
pub struct RunReport<C: Serialize, R: Serialize> {
    pub command: &'static str,
    pub config: C,
    pub results: R,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub command: &'static str,
    pub wall_seconds: f64,
}

/// Everything a command produced, written only once the computation is done.
#[derive(Debug)]
pub struct Artifacts {
    pub command: &'static str,
    pub report: String,
    pub files: Vec<(String, Vec<u8>)>,
    /// Human-readable summary for stdout.
    pub table: String,
    /// Set when the run completed but its outcome is a failure.
    pub failure: Option<CliError>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV text with a header row and CRLF record ends.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Shortest float text that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone)]
pub struct OutputDir {
    path: PathBuf,
}

impl OutputDir {
    /// Creates the directory and checks that it takes files.
    pub fn prepare(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|e| CliError::io(path, e))?;
        let probe = path.join(".dplab-write-check");
        fs::write(&probe, b"").map_err(|e| CliError::io(&probe, e))?;
        fs::remove_file(&probe).map_err(|e| CliError::io(&probe, e))?;
        Ok(OutputDir { path: path.to_path_buf() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let p = self.path.join(name);
        fs::write(&p, bytes).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }

    /// Writes `report.json`, the extra files and `timing.json`.
    pub fn write_artifacts(&self, a: &Artifacts, wall_seconds: f64) -> Result<Vec<PathBuf>, CliError> {
        let mut written = vec![self.write("report.json", a.report.as_bytes())?];
        for (name, bytes) in &a.files {
            written.push(self.write(name, bytes)?);
        }
        let timing = to_json(&Timing { command: a.command, wall_seconds });
        written.push(self.write("timing.json", timing.as_bytes())?);
        Ok(written)
    }
}
