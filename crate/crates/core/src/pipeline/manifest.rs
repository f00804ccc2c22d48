//! Artifact manifest: relative path, SHA-256, and size of every file a
//! pipeline run writes. Carries no timestamps, so identical runs produce
//! byte-identical manifests.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct Manifest {
    pub schema_version: u32,
    pub artifacts: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest { schema_version: 1, artifacts: Vec::new() }
    }

    /// Hash a written artifact and record it under its path relative to
    /// the output root.
    pub fn add(&mut self, root: &Path, file: &Path) -> Result<()> {
        let data = std::fs::read(file)?;
        let digest = Sha256::digest(&data);
        let rel = file.strip_prefix(root).unwrap_or(file);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        self.artifacts.push(ManifestEntry {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: hex,
            bytes: data.len() as u64,
        });
        Ok(())
    }

    /// Write `manifest.json` (sorted by path) and return its location.
    pub fn write(&mut self, root: &Path) -> Result<PathBuf> {
        self.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
        if self.artifacts.iter().zip(self.artifacts.iter().skip(1)).any(|(a, b)| a.path == b.path)
        {
            return Err(Error::invalid("duplicate artifact path in manifest"));
        }
        let path = root.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}
