//! CSV tables, the JSON manifest, and the writer that emits them.
//!
//! Numbers are written with Rust's shortest round-trip `f64` formatting
//! (exponent form for very large or small magnitudes), so a fixed config
//! and seed reproduce every byte. `None` becomes an empty field.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{RunError, RunResult};

pub const MANIFEST_NAME: &str = "manifest.json";

/// Cell formatting for table rows.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for i64 {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for u64 {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for str {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

impl<T: Cell> Cell for Option<T> {
    fn cell(&self) -> String {
        self.as_ref().map(Cell::cell).unwrap_or_default()
    }
}

impl<T: Cell + ?Sized> Cell for &T {
    fn cell(&self) -> String {
        (**self).cell()
    }
}

/// Build a row from heterogeneous cells.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::cell(&$x)),*]
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; the table is written to `<name>.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> RunResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> RunResult<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }

    /// Column values by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// Tables plus the manifest of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunBundle {
    pub tables: Vec<Table>,
    pub manifest: Value,
}

impl RunBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Removes the files it tracks unless disarmed.
struct Cleanup {
    files: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    armed: bool,
}

impl Drop for Cleanup {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if let Some(dir) = &self.created_dir {
            let _ = fs::remove_dir(dir);
        }
    }
}

/// Write every table and then the manifest (with a file list carrying row
/// counts and checksums) into `dir`. On any failure the files written so
/// far are removed, and so is `dir` if this call created it.
pub fn write_bundle(dir: &Path, bundle: &RunBundle) -> RunResult<Vec<PathBuf>> {
    let created_dir = if dir.exists() {
        None
    } else {
        fs::create_dir_all(dir)?;
        Some(dir.to_path_buf())
    };
    let mut guard = Cleanup {
        files: Vec::new(),
        created_dir,
        armed: true,
    };
    let mut listing = Vec::new();
    for table in &bundle.tables {
        let bytes = table.to_csv_bytes()?;
        let path = dir.join(table.file_name());
        guard.files.push(path.clone());
        fs::write(&path, &bytes)?;
        listing.push(serde_json::json!({
            "name": table.file_name(),
            "rows": table.rows.len(),
            "sha256": sha256_hex(&bytes),
        }));
    }
    let mut manifest = bundle.manifest.clone();
    match manifest.as_object_mut() {
        Some(obj) => {
            obj.insert("files".into(), Value::Array(listing));
        }
        None => return Err(RunError::data("output", "manifest is not a JSON object")),
    }
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| RunError::data("output", e.to_string()))?;
    text.push('\n');
    let path = dir.join(MANIFEST_NAME);
    guard.files.push(path.clone());
    fs::write(&path, text)?;
    guard.armed = false;
    Ok(guard.files.clone())
}
