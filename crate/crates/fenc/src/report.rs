//! Report documents and their JSON / CSV renderings.
//!
//! Every JSON document starts with `schema_version` and `kind`. CSV outputs
//! have a fixed header per report kind. Files are written atomically
//! (temporary file in the target directory, then rename).

use std::io::Write;
use std::path::Path;

use fenc_core::array::{Topology, WriteCounters};
use fenc_core::cipher::KeyGranularity;
use fenc_core::perfmodel::{ComparisonReport, SchemeMetrics};
use fenc_core::threat::{AttackReport, BerResult};
use fenc_core::workloads::ReductionReport;
use serde::Serialize;

use crate::{FencError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(kind: &str, body: &T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FencError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| FencError::io(path, e))?;
    tmp.persist(path).map_err(|e| FencError::io(path, e.error))?;
    Ok(())
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w.into_inner().map_err(|e| FencError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Cell read-out of one round-trip run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub topology: Topology,
    pub granularity: KeyGranularity,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub pt: Vec<String>,
    /// Key bit applied to each cell.
    pub keys: Vec<String>,
    pub ct: Vec<String>,
    /// Effective V_TH per device: physical row `2r` holds top devices,
    /// `2r + 1` bottom devices.
    pub vth_map: Vec<Vec<f64>>,
    pub state_map: Vec<String>,
    /// Key set used for the readout: `correct`, `all-zero` or `random`.
    pub readout_keys: String,
    pub recovered: Vec<String>,
    pub accuracy: f64,
    pub correct_key_accuracy: f64,
    pub write_counters: WriteCounters,
    pub sense_cycles: usize,
}

#[derive(Serialize)]
struct PerfRow<'a> {
    scheme: &'a str,
    enc_latency_cycles: f64,
    dec_latency_cycles: f64,
    enc_throughput_mbps: f64,
    dec_throughput_mbps: f64,
    power_mw: f64,
    area_mm2: String,
    enc_speedup: f64,
    dec_speedup: f64,
}

pub fn perf_csv(report: &ComparisonReport) -> Result<String> {
    let row = |m: &SchemeMetrics, enc: f64, dec: f64| PerfRow {
        scheme: m.scheme.as_str(),
        enc_latency_cycles: m.enc_latency_cycles,
        dec_latency_cycles: m.dec_latency_cycles,
        enc_throughput_mbps: m.enc_throughput_mbps,
        dec_throughput_mbps: m.dec_throughput_mbps,
        power_mw: m.power_mw,
        area_mm2: m.area_mm2.map_or_else(|| "negligible".to_string(), |a| a.to_string()),
        enc_speedup: enc,
        dec_speedup: dec,
    };
    csv_string(|w| {
        w.serialize(row(&report.in_situ, report.enc_speedup, report.dec_speedup))?;
        w.serialize(row(&report.aes, 1.0, 1.0))
    })
}

pub fn attack_csv(report: &AttackReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(["trial", "accuracy", "key_agreement"])?;
        for t in &report.per_trial {
            w.write_record([t.trial.to_string(), t.accuracy.to_string(), t.key_agreement.to_string()])?;
        }
        Ok(())
    })
}

pub fn workloads_csv(report: &ReductionReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(["workload", "aes_cycles", "insitu_cycles", "reduction"])?;
        for r in &report.workloads {
            w.write_record([
                r.workload.clone(),
                r.aes.total_cycles.to_string(),
                r.in_situ.total_cycles.to_string(),
                r.reduction.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn ber_csv(results: &[BerResult]) -> Result<String> {
    csv_string(|w| {
        w.write_record(["vth_sigma", "bits", "errors", "ber"])?;
        for r in results {
            w.write_record([r.vth_sigma.to_string(), r.bits.to_string(), r.errors.to_string(), r.ber().to_string()])?;
        }
        Ok(())
    })
}

pub fn roundtrip_csv(report: &RoundtripReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(["row", "col", "pt", "key", "ct", "recovered"])?;
        for r in 0..report.rows {
            for c in 0..report.cols {
                let bit = |rows: &[String]| rows[r][c..c + 1].to_string();
                w.write_record([
                    r.to_string(),
                    c.to_string(),
                    bit(&report.pt),
                    bit(&report.keys),
                    bit(&report.ct),
                    bit(&report.recovered),
                ])?;
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fenc_core::perfmodel::{compare, BaselineCosts, PerfConfig};

    #[test]
    fn envelope_leads_with_schema() {
        let json = to_json("perf", &compare(&PerfConfig::default(), &BaselineCosts::default()).unwrap());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], "perf");
        assert!(json.starts_with("{\n  \"schema_version\": 1,\n  \"kind\": \"perf\""));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
