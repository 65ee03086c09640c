//! Interface to the in-page extractor: its run configuration and the
//! ingestion of whatever it prints.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use groundsynth_core::snapshot::PageSnapshot;

use crate::snapshot_io::{parse_snapshot, SnapshotError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ViewportProfile {
    Desktop,
    Mobile,
}

/// Passed to the extractor as JSON in the `EXTRACT_CONFIG` environment variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub max_elements: usize,
    pub include_offscreen: bool,
    pub viewport_profile: ViewportProfile,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self { max_elements: 5000, include_offscreen: false, viewport_profile: ViewportProfile::Desktop }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("max_elements must be positive")]
    BadConfig,
    #[error("driver failed to start: {0}")]
    Spawn(std::io::Error),
    #[error("driver exited with {status}: {stderr}")]
    Driver { status: std::process::ExitStatus, stderr: String },
    #[error("driver output rejected: {0}")]
    Snapshot(#[from] SnapshotError),
    #[error("snapshot has {count} elements, above max_elements {max}")]
    TooMany { count: usize, max: usize },
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), ExtractError> {
        if self.max_elements == 0 {
            Err(ExtractError::BadConfig)
        } else {
            Ok(())
        }
    }
}

/// Validates extractor output against the snapshot schema and the element cap.
pub fn ingest(raw: &[u8], cfg: &ExtractionConfig) -> Result<PageSnapshot, ExtractError> {
    cfg.validate()?;
    let s = parse_snapshot(raw)?;
    if s.elements.len() > cfg.max_elements {
        return Err(ExtractError::TooMany { count: s.elements.len(), max: cfg.max_elements });
    }
    Ok(s)
}

/// Runs `driver` through `sh -c` and ingests its standard output.
///
/// The driver is any program that loads a page, evaluates the extraction
/// script in it and prints the result.
pub fn run_driver(driver: &str, cfg: &ExtractionConfig, workdir: Option<&Path>) -> Result<PageSnapshot, ExtractError> {
    cfg.validate()?;
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(driver)
        .env("EXTRACT_CONFIG", serde_json::to_string(cfg).expect("config serializes"))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(d) = workdir {
        cmd.current_dir(d);
    }
    let out = cmd.output().map_err(ExtractError::Spawn)?;
    if !out.status.success() {
        return Err(ExtractError::Driver { status: out.status, stderr: String::from_utf8_lossy(&out.stderr).into_owned() });
    }
    let _ = std::io::stderr().write_all(&out.stderr);
    ingest(&out.stdout, cfg)
}
