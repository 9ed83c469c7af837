//! The run configuration file.
//!
//! A TOML document naming the dataset, the output directory, and the
//! experiment grid. Unknown keys are rejected so typos fail loudly instead
//! of silently falling back to defaults. Every run echoes its fully
//! resolved configuration (after flag and environment overrides) into the
//! output directory as `resolved_config.toml`; running from that file
//! reproduces the report byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bodyfield_core::classify::Hyperparams;
use bodyfield_core::error::{Error, Result};
use bodyfield_core::evaluate::{ExperimentConfig, SensorConfig};
use bodyfield_core::preprocess::{TaskMode, WindowParams};

/// Environment variable that overrides `dataset_root`.
pub const DATA_ROOT_ENV: &str = "BODYFIELD_DATA_ROOT";

fn default_workers() -> usize {
    1
}

fn default_smoothing_radius() -> usize {
    3
}

fn default_sensor_configs() -> Vec<SensorConfig> {
    ExperimentConfig::default().sensor_configs
}

fn default_tasks() -> Vec<TaskMode> {
    TaskMode::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory holding the session files (and usually a manifest).
    pub dataset_root: PathBuf,
    /// Where report files go.
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 1 keeps runs serial. Results are identical either way.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_smoothing_radius")]
    pub smoothing_radius: usize,
    #[serde(default = "default_sensor_configs")]
    pub sensor_configs: Vec<SensorConfig>,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<TaskMode>,
    #[serde(default)]
    pub window: WindowParams,
    #[serde(default)]
    pub hyperparams: Hyperparams,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| {
            Error::config(format!("{}: {}", path.display(), e.message()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::config(format!("cannot serialize configuration: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        self.experiment_config().validate().map_err(|e| {
            Error::config(format!("run configuration rejected: {e}"))
        })
    }

    /// The part the experiment driver consumes.
    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            sensor_configs: self.sensor_configs.clone(),
            tasks: self.tasks.clone(),
            window: self.window,
            smoothing_radius: self.smoothing_radius,
            hyperparams: Hyperparams {
                seed: self.seed,
                ..self.hyperparams
            },
            seed: self.seed,
        }
    }
}
