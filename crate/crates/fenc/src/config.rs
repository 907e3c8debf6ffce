//! Global JSON configuration.
//!
//! Every section is optional; missing fields take the model defaults. The
//! file is found through `--config PATH`, then the `FENC_CONFIG` environment
//! variable, and otherwise the built-in defaults are used.

use std::path::{Path, PathBuf};

use fenc_core::array::{default_sense_threshold, ArrayConfig, ReadVoltages, Topology};
use fenc_core::device::DeviceParams;
use fenc_core::perfmodel::{BaselineCosts, PerfConfig};
use fenc_core::workloads::TrafficMode;
use serde::{Deserialize, Serialize};

use crate::{FencError, Result};

pub const CONFIG_ENV: &str = "FENC_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub rows_logical: usize,
    pub cols: usize,
    pub topology: Topology,
    /// Defaults to the geometric mean of `i_on` and `2 * i_off`.
    pub sense_threshold: Option<f64>,
    pub num_sense_amps: usize,
    /// Defaults to one block spanning the whole array.
    pub block_rows: Option<usize>,
    pub read_voltages: ReadVoltages,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            rows_logical: 128,
            cols: 128,
            topology: Topology::And,
            sense_threshold: None,
            num_sense_amps: 16,
            block_rows: None,
            read_voltages: ReadVoltages::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    pub device: DeviceParams,
    pub array: ArraySection,
    pub perf: PerfConfig,
    pub baseline: BaselineCosts,
    pub traffic: TrafficMode,
    pub seed: u64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            device: DeviceParams::default(),
            array: ArraySection::default(),
            perf: PerfConfig::default(),
            baseline: BaselineCosts::default(),
            traffic: TrafficMode::AllLayers,
            seed: 0,
        }
    }
}

impl GlobalConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FencError::io(path, e))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| FencError::json(path, e))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads `explicit` if given, else the file named by `FENC_CONFIG`, else
    /// the defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(path) => Self::load(&path),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.array_config()?;
        self.perf.validate()?;
        Ok(())
    }

    /// The configured array with the configured device parameters.
    pub fn array_config(&self) -> Result<ArrayConfig> {
        self.array_config_sized(self.array.rows_logical, self.array.cols)
    }

    /// The configured array resized to `rows x cols`. An unset block size
    /// becomes one block over all rows.
    pub fn array_config_sized(&self, rows: usize, cols: usize) -> Result<ArrayConfig> {
        let a = &self.array;
        let config = ArrayConfig {
            rows_logical: rows,
            cols,
            topology: a.topology,
            device: self.device,
            sense_threshold: a.sense_threshold.unwrap_or_else(|| default_sense_threshold(&self.device)),
            num_sense_amps: a.num_sense_amps,
            block_rows: a.block_rows.unwrap_or(rows).clamp(1, rows.max(1)),
            read_voltages: a.read_voltages,
        };
        config.validate()?;
        Ok(config)
    }
}
