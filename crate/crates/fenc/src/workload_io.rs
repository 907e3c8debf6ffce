//! Workload descriptor files.
//!
//! ```json
//! {
//!   "name": "alexnet",
//!   "precision_bits": 8,
//!   "layers": [
//!     {"name": "conv1", "weight_bits": 186368, "output_bits": 1548800}
//!   ]
//! }
//! ```
//!
//! Bit counts are non-negative integers; unknown fields are rejected.

use std::path::Path;

use fenc_core::workloads::{Layer, WorkloadSpec};
use serde::Deserialize;

use crate::{FencError, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    name: String,
    weight_bits: u64,
    output_bits: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadFile {
    name: String,
    #[serde(default)]
    precision_bits: Option<u32>,
    layers: Vec<LayerFile>,
}

pub fn parse(text: &str, origin: &Path) -> Result<WorkloadSpec> {
    let file: WorkloadFile = serde_json::from_str(text).map_err(|e| FencError::json(origin, e))?;
    Ok(WorkloadSpec {
        name: file.name,
        precision_bits: file.precision_bits,
        layers: file
            .layers
            .into_iter()
            .map(|l| Layer {
                name: l.name,
                weight_bits: l.weight_bits,
                output_bits: l.output_bits,
            })
            .collect(),
    })
}

pub fn load_workload(path: &Path) -> Result<WorkloadSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| FencError::io(path, e))?;
    parse(&text, path)
}

/// Loads every `*.json` file in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<WorkloadSpec>> {
    let entries = std::fs::read_dir(dir).map_err(|e| FencError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| FencError::io(dir, e))?.path();
        if path.extension().is_some_and(|ext| ext == "json") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(FencError::Usage(format!("{}: no workload descriptors (*.json)", dir.display())));
    }
    paths.sort();
    paths.iter().map(|p| load_workload(p)).collect()
}
