use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{EmitFlags, RunConfig};
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

/// Output directory honouring the emit flags.
pub struct OutputDir {
    root: PathBuf,
    emit: EmitFlags,
}

impl OutputDir {
    pub fn create(root: &Path, emit: EmitFlags) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(CliError::io(root))?;
        Ok(Self { root: root.to_path_buf(), emit })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn put(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(CliError::io(path))
    }

    pub fn csv(&self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> CliResult<()> {
        if !self.emit.csv {
            return Ok(());
        }
        let mut buf = Vec::new();
        fill(&mut buf).map_err(CliError::io(self.root.join(name)))?;
        self.put(name, &buf)
    }

    pub fn json<S: Serialize>(&self, name: &str, value: &S) -> CliResult<()> {
        if !self.emit.json {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value).expect("serializable output");
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    pub fn svg(&self, name: &str, content: &str) -> CliResult<()> {
        if !self.emit.svg {
            return Ok(());
        }
        self.put(name, content.as_bytes())
    }

    /// Hashes every regular file in the directory (except the manifest
    /// itself) and writes `manifest.json`. Always written, whatever the flags.
    pub fn write_manifest(&self, command: &str, cfg: &RunConfig) -> CliResult<Manifest> {
        let mut files = BTreeMap::new();
        let entries = fs::read_dir(&self.root).map_err(CliError::io(&self.root))?;
        for entry in entries {
            let entry = entry.map_err(CliError::io(&self.root))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name == MANIFEST || !entry.file_type().map_err(CliError::io(entry.path()))?.is_file() {
                continue;
            }
            let bytes = fs::read(entry.path()).map_err(CliError::io(entry.path()))?;
            files.insert(name, hex::encode(Sha256::digest(&bytes)));
        }
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: cfg.seed,
            parameters: cfg.clone(),
            files,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        self.put(MANIFEST, text.as_bytes())?;
        Ok(manifest)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub parameters: RunConfig,
    /// File name to SHA-256 hex digest.
    pub files: BTreeMap<String, String>,
}
