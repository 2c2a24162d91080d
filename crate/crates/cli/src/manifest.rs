use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub preset: Option<String>,
    pub config: Option<String>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        preset: Option<String>,
        config: Option<String>,
        seeds: Vec<u64>,
        inputs: &[PathBuf],
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            preset,
            config,
            seeds,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

/// Writes through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Files written by one command.
#[derive(Debug, Default)]
pub struct Outputs {
    paths: Vec<PathBuf>,
}

impl Outputs {
    pub fn write(&mut self, path: &Path, content: impl AsRef<[u8]>) -> Result<()> {
        write_atomic(path, content.as_ref())?;
        self.paths.push(path.to_path_buf());
        Ok(())
    }

    pub fn extend(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.paths.extend(paths);
    }

    /// One manifest in every directory that received output.
    pub fn finish(self, manifest: &RunManifest) -> Result<()> {
        let dirs: BTreeSet<PathBuf> = self
            .paths
            .iter()
            .map(|p| p.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf))
            .collect();
        let mut full = manifest.clone();
        full.outputs = self.paths.iter().map(|p| p.display().to_string()).collect();
        let json = serde_json::to_string_pretty(&full)? + "\n";
        for dir in dirs {
            write_atomic(&dir.join(MANIFEST_NAME), json.as_bytes())?;
        }
        Ok(())
    }
}
