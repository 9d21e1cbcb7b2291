//! Scenario files, log/plot writers and the golden-suite runner behind the
//! `zest` binary.

pub mod csv_log;
pub mod scenario_file;
pub mod suite;
pub mod svg;

use std::path::{Path, PathBuf};

use zest_core::simulator::ScenarioConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("scenario file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("serializing scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("scenario file: {0}")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] zest_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Command-line overrides. A forecast step that tracked the old `dt` follows
/// the new one.
pub fn apply_overrides(config: &mut ScenarioConfig, seed: Option<u64>, dt: Option<f64>) {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(dt) = dt {
        if config.field.scan_step == config.dt {
            config.field.scan_step = dt;
        }
        config.dt = dt;
    }
}
