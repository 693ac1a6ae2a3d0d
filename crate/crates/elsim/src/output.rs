//! Artifact sets and their on-disk form: CSV tables, field snapshots and a
//! manifest with a SHA-256 per file.
//!
//! The manifest is plain text, one `key = value` per line:
//!
//! ```text
//! format = elsim-manifest-1
//! version = <crate version>
//! config.<key> = <value>        (one per configuration key)
//! summary.<key> = <value>
//! check.<name> = pass | fail
//! entries = <n>
//! entry = <file> <bytes> <sha256>
//! ```

use std::fs;
use std::path::Path;

use elsim_core::report::EstimateReport;
use elsim_core::Field;
use sha2::{Digest, Sha256};

use crate::error::AppError;
use crate::snapshot;

pub const MANIFEST: &str = "manifest.txt";

/// Round-trip decimal form used for every number written out.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File name without extension.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn numeric(name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: rows.into_iter().map(|r| r.into_iter().map(num).collect()).collect(),
        }
    }

    pub fn reports(name: &str, reports: &[EstimateReport]) -> Self {
        Self {
            name: name.into(),
            header: EstimateReport::HEADER.iter().map(|h| h.to_string()).collect(),
            rows: reports.iter().map(|r| r.fields().to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    /// Configuration echo, `key = value` lines.
    pub config: String,
    pub tables: Vec<Table>,
    pub snapshots: Vec<(String, Field)>,
    pub checks: Vec<Check>,
    pub summary: Vec<(String, String)>,
}

impl Artifacts {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub text: String,
}

fn entry(dir: &Path, file: String) -> Result<ManifestEntry, AppError> {
    let path = dir.join(&file);
    let bytes = fs::read(&path).map_err(AppError::io(&path))?;
    Ok(ManifestEntry { file, bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) })
}

/// Writes every table and snapshot into `dir`, then the manifest. Entries
/// follow the artifact order: tables, then snapshots.
pub fn write_outputs(artifacts: &Artifacts, dir: &Path) -> Result<Manifest, AppError> {
    fs::create_dir_all(dir).map_err(AppError::io(dir))?;
    let mut entries = Vec::new();
    for t in &artifacts.tables {
        let file = format!("{}.csv", t.name);
        let path = dir.join(&file);
        let csv_err = |source| AppError::Csv { path: path.clone(), source };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(&t.header).map_err(csv_err)?;
        for row in &t.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(AppError::io(&path))?;
        drop(w);
        entries.push(entry(dir, file)?);
    }
    for (name, field) in &artifacts.snapshots {
        let file = format!("{name}.fld");
        let path = dir.join(&file);
        fs::write(&path, snapshot::encode(field)).map_err(AppError::io(&path))?;
        entries.push(entry(dir, file)?);
    }

    let mut text = String::from("format = elsim-manifest-1\n");
    text.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    for line in artifacts.config.lines().filter(|l| !l.trim().is_empty()) {
        text.push_str(&format!("config.{}\n", line.trim()));
    }
    for (k, v) in &artifacts.summary {
        text.push_str(&format!("summary.{k} = {v}\n"));
    }
    for c in &artifacts.checks {
        text.push_str(&format!("check.{} = {}\n", c.name, if c.pass { "pass" } else { "fail" }));
    }
    text.push_str(&format!("entries = {}\n", entries.len()));
    for e in &entries {
        text.push_str(&format!("entry = {} {} {}\n", e.file, e.bytes, e.sha256));
    }
    let path = dir.join(MANIFEST);
    fs::write(&path, &text).map_err(AppError::io(&path))?;
    Ok(Manifest { entries, text })
}
