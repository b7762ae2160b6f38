//! Run configurations and manifests.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use freepos::rmt::Seed;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::commands::Params;

/// Version of the configuration and manifest documents (see `schema/config.schema.json`).
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{0}")]
    Other(String),
}

impl ConfigError {
    pub fn other(msg: impl Into<String>) -> Self {
        ConfigError::Other(msg.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emit {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

fn yes() -> bool {
    true
}

impl Default for Emit {
    fn default() -> Self {
        Emit {
            csv: true,
            json: true,
            svg: true,
        }
    }
}

impl Emit {
    pub fn from_list(list: &[Artifact]) -> Self {
        Emit {
            csv: list.contains(&Artifact::Csv),
            json: list.contains(&Artifact::Json),
            svg: list.contains(&Artifact::Svg),
        }
    }
}

/// A complete, replayable description of one CLI run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRun")]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub params: Params,
    pub seed: Seed,
    pub output_dir: PathBuf,
    pub emit: Emit,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default = "schema_version")]
    schema_version: u32,
    command: String,
    params: serde_json::Value,
    seed: Seed,
    output_dir: PathBuf,
    #[serde(default)]
    emit: Emit,
}

impl TryFrom<RawRun> for RunConfig {
    type Error = String;

    fn try_from(raw: RawRun) -> Result<Self, String> {
        let doc = serde_json::json!({ "command": raw.command, "params": raw.params });
        let params: Params = serde_path_to_error::deserialize(doc).map_err(|e| {
            let key = e.path().to_string();
            format!("key `{key}`: {}", e.into_inner())
        })?;
        Ok(RunConfig {
            schema_version: raw.schema_version,
            params,
            seed: raw.seed,
            output_dir: raw.output_dir,
            emit: raw.emit,
        })
    }
}

/// Written next to every run's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub library_version: String,
    pub cli_version: String,
    pub seed: Seed,
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

/// Parses JSON into `T`, reporting the offending key path and position.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Invalid {
            path: if key == "." {
                origin.to_string()
            } else {
                format!("{origin}: key `{key}`")
            },
            msg: inner.to_string(),
        }
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::other(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = read_json(path)?;
        cfg.check_version()?;
        Ok(cfg)
    }

    pub fn check_version(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::other(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        Ok(())
    }
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let m: Manifest = read_json(path)?;
        m.config.check_version()?;
        Ok(m)
    }
}
