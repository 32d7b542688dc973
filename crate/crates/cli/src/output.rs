//! Deterministic result files: CSV curves at fixed precision and a JSON
//! manifest with content digests, so identical configs produce identical
//! bytes.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// All floats are written with 12 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

/// A CSV file under construction.
pub struct Csv {
    name: String,
    lines: Vec<String>,
}

impl Csv {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            lines: vec![header.join(",")],
        }
    }

    pub fn row(&mut self, values: &[String]) {
        self.lines.push(values.join(","));
    }

    pub fn numeric_row(&mut self, values: &[f64]) {
        self.row(&values.iter().map(|v| fmt(*v)).collect::<Vec<_>>());
    }

    fn bytes(&self) -> Vec<u8> {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text.into_bytes()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Run manifest: inputs, parameters, solver metadata and the digests of
/// every file the run wrote.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub workflow: String,
    pub config_sha256: String,
    pub parameters: serde_json::Value,
    pub solver: serde_json::Value,
    pub warnings: Vec<String>,
    pub outputs: Vec<ManifestFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Collects output files and writes them (plus the manifest) in one pass.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputDir {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn push_csv(&mut self, csv: Csv) {
        self.files.push((csv.name.clone(), csv.bytes()));
    }

    pub fn push_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    /// Write all collected files and the manifest listing them.
    pub fn finish(
        self,
        workflow: &str,
        config_bytes: &[u8],
        parameters: serde_json::Value,
        solver: serde_json::Value,
        warnings: Vec<String>,
    ) -> Result<PathBuf, CliError> {
        let mut outputs = Vec::new();
        for (name, bytes) in &self.files {
            outputs.push(ManifestFile {
                name: name.clone(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len(),
            });
            fs::write(self.dir.join(name), bytes)?;
        }
        let manifest = Manifest {
            workflow: workflow.to_string(),
            config_sha256: sha256_hex(config_bytes),
            parameters,
            solver,
            warnings,
            outputs,
        };
        let path = self.dir.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
        bytes.push(b'\n');
        fs::write(&path, bytes)?;
        Ok(path)
    }
}
