//! Run manifest: resolved config, timing, exit status and the output
//! inventory with content digests.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub started_utc: String,
    pub finished_utc: String,
    pub resolved_config: RunConfig,
    pub exit_status: i32,
    pub warnings: usize,
    pub incomplete: bool,
    pub outputs: Vec<FileEntry>,
}

pub struct ManifestBuilder {
    command: String,
    started: chrono::DateTime<chrono::Utc>,
    out_dir: PathBuf,
    files: Vec<PathBuf>,
    pub warnings: usize,
}

impl ManifestBuilder {
    pub fn new(command: &str, out_dir: &Path) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            started: chrono::Utc::now(),
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            warnings: 0,
        }
    }

    /// Register an emitted file (relative to the output directory).
    pub fn add_file(&mut self, name: &str) {
        self.files.push(self.out_dir.join(name));
    }

    pub fn warn(&mut self, msg: &str) {
        eprintln!("warning: {msg}");
        self.warnings += 1;
    }

    /// Write manifest.json; every registered file is digested. Called last,
    /// so a missing manifest marks an aborted run and `incomplete` marks a
    /// run that failed after emitting partial outputs.
    pub fn finish(self, config: &RunConfig, exit_status: i32) -> std::io::Result<()> {
        let mut outputs = Vec::new();
        for f in &self.files {
            let data = std::fs::read(f)?;
            let mut hasher = Sha256::new();
            hasher.update(&data);
            outputs.push(FileEntry {
                path: f
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                bytes: data.len() as u64,
                sha256: format!("{:x}", hasher.finalize()),
            });
        }
        let manifest = RunManifest {
            tool: "henon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            started_utc: self.started.to_rfc3339(),
            finished_utc: chrono::Utc::now().to_rfc3339(),
            resolved_config: config.clone(),
            exit_status,
            warnings: self.warnings,
            incomplete: exit_status != 0,
            outputs,
        };
        let path = self.out_dir.join("manifest.json");
        std::fs::write(path, serde_json::to_string_pretty(&manifest)?)
    }
}
