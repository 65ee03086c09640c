//! Run configuration and policy files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use groundsynth_core::expression::{PolicyError, SynthesisPolicy};
use groundsynth_core::synth::Caps;

use crate::augment::AugmentConfig;

/// Mirrors the command-line flags; flags win over file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub policy: Option<PathBuf>,
    pub caps: Caps,
    pub mock_llm: bool,
    pub jobs: Option<usize>,
    pub augment: AugmentConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Policy { path: PathBuf, source: PolicyError },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let raw = std::fs::read(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    serde_json::from_slice(&raw).map_err(|source| ConfigError::Parse { path: path.into(), source })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    read_json(path)
}

/// Reads and validates a policy file. Missing keys take their defaults.
pub fn load_policy(path: &Path) -> Result<SynthesisPolicy, ConfigError> {
    let p: SynthesisPolicy = read_json(path)?;
    p.validate().map_err(|source| ConfigError::Policy { path: path.into(), source })?;
    Ok(p)
}
