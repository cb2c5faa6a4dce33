//! Output directory, versioned CSV/JSON writers and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub created_unix: u64,
    pub outputs: Vec<OutputEntry>,
}

impl Manifest {
    pub fn read(path: &Path) -> CliResult<Manifest> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("manifest", e.to_string()))
    }
}

/// Every file a command writes goes through here, relative to one root.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<OutputDir> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        if name.contains(['/', '\\']) || name.starts_with('.') || name == MANIFEST_FILE {
            return Err(CliError::config("output", format!("refusing file name {name:?}")));
        }
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.entries.push(OutputEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// `# schema=silt-<kind>/1`, a header row, then `rows`.
    pub fn write_csv(&mut self, name: &str, schema: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut s = format!("# schema=silt-{schema}/1\n{}\n", header.join(","));
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.write(name, s.as_bytes())
    }

    /// Wraps `value` as `{"schema": "silt-<kind>/1", ...}`.
    pub fn write_json(&mut self, name: &str, schema: &str, value: serde_json::Value) -> CliResult<()> {
        let mut obj = serde_json::Map::new();
        obj.insert("schema".into(), format!("silt-{schema}/1").into());
        match value {
            serde_json::Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Whitespace-separated two-column plot data.
    pub fn write_columns(&mut self, name: &str, schema: &str, labels: (&str, &str), rows: &[(f64, f64)]) -> CliResult<()> {
        let mut s = format!("# schema=silt-{schema}/1\n# {} {}\n", labels.0, labels.1);
        for (a, b) in rows {
            s.push_str(&format!("{} {}\n", fmt_f64(*a), fmt_f64(*b)));
        }
        self.write(name, s.as_bytes())
    }

    pub fn finish(self, cfg: &RunConfig) -> CliResult<Manifest> {
        let manifest = Manifest {
            schema: "silt-manifest/1".into(),
            tool: "silt".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: cfg.command.tag().into(),
            config: cfg.values().clone(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: self.entries,
        };
        let path = self.root.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).expect("json") + "\n";
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
