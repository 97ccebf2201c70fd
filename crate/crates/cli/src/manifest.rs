//! Output directory bookkeeping and the run manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use fraccal::geometry::{DomainConfig, GeometryMode};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// What a run was, what it read and what it wrote.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// SHA-256 of the configuration bytes.
    pub config_hash: Option<String>,
    pub seed: u64,
    pub s: Option<f64>,
    pub h: Option<f64>,
    #[serde(rename = "R")]
    pub half_width: Option<f64>,
    pub n: Option<usize>,
    pub mode: Option<GeometryMode>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: None,
            seed,
            s: None,
            h: None,
            half_width: None,
            n: None,
            mode: None,
            started: now(),
            finished: 0,
            files: Vec::new(),
        }
    }

    pub fn with_domain(mut self, domain: &DomainConfig, s: f64, hash: &str) -> Self {
        self.config_hash = Some(hash.to_string());
        self.s = Some(s);
        self.h = Some(domain.h);
        self.half_width = Some(domain.half_width);
        self.n = Some(domain.n);
        self.mode = Some(domain.mode);
        self
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes files into the output directory and remembers their names.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes the manifest, listing every file including itself.
    pub fn finish(mut self, mut manifest: RunManifest) -> CliResult<()> {
        self.files.push(MANIFEST_FILE.to_string());
        manifest.files = self.files.clone();
        manifest.finished = now();
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        bytes.push(b'\n');
        let path = self.dir.join(MANIFEST_FILE);
        std::fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })
    }
}
