//! Run manifests: what was run, with which seed, and what it produced.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::{sha256_hex, write_atomic};
use crate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the output directory.
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub command: String,
    pub master_seed: u64,
    /// Full config in `key = value` form.
    pub config: String,
    pub files: Vec<FileRecord>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, master_seed: u64, config: String) -> Self {
        Self {
            toolkit: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            master_seed,
            config,
            files: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    /// Writes `bytes` atomically under `dir` and records its checksum.
    pub fn emit(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&dir.join(name), bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileRecord {
            name: name.into(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&dir.join(MANIFEST_NAME), format!("{json}\n").as_bytes())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Schema {
            path,
            msg: e.to_string(),
        })
    }

    /// Names of recorded files whose current contents differ from the manifest.
    pub fn mismatched_files(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match fs::read(dir.join(&f.name)) {
                Ok(b) => sha256_hex(&b) != f.sha256,
                Err(_) => true,
            })
            .map(|f| f.name.clone())
            .collect()
    }
}
