//! Encryption / decryption latency for neural-network weight and activation
//! traffic.
//!
//! Weights are stored encrypted and decrypted once per inference when they
//! are fed to the accelerator. Layer outputs are encrypted once when they are
//! written back. Compute time is not modeled.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::perfmodel::{dec_latency, enc_latency, BaselineCosts, PerfConfig};
use crate::{Error, Result};

/// AES block size; the baseline processes traffic in 128-bit words.
pub const AES_BLOCK_BITS: u64 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    pub weight_bits: u64,
    pub output_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub name: String,
    /// Bits per weight / activation element the descriptor was generated with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrafficMode {
    /// Every layer's output is encrypted on store.
    #[default]
    AllLayers,
    /// Only the final layer's output is encrypted.
    FinalLayer,
}

impl WorkloadSpec {
    pub fn total_weight_bits(&self) -> u64 {
        self.layers.iter().map(|l| l.weight_bits).sum()
    }

    pub fn encrypted_output_bits(&self, traffic: TrafficMode) -> u64 {
        match traffic {
            TrafficMode::AllLayers => self.layers.iter().map(|l| l.output_bits).sum(),
            TrafficMode::FinalLayer => self.layers.last().map_or(0, |l| l.output_bits),
        }
    }

    /// Multiplies every bit count by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                name: l.name.clone(),
                weight_bits: l.weight_bits * factor,
                output_bits: l.output_bits * factor,
            })
            .collect();
        Self {
            name: self.name.clone(),
            precision_bits: self.precision_bits,
            layers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    InSitu(PerfConfig),
    AesBaseline(BaselineCosts),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeLatency {
    pub enc_cycles: f64,
    pub dec_cycles: f64,
    pub total_cycles: f64,
}

impl SchemeLatency {
    fn new(enc_cycles: f64, dec_cycles: f64) -> Self {
        Self {
            enc_cycles,
            dec_cycles,
            total_cycles: enc_cycles + dec_cycles,
        }
    }
}

pub fn scheme_latency(spec: &WorkloadSpec, scheme: &Scheme, traffic: TrafficMode) -> SchemeLatency {
    let (word_bits, enc_per_word, dec_per_word) = match scheme {
        Scheme::InSitu(cfg) => (cfg.word_bits, enc_latency(cfg) as f64, dec_latency(cfg) as f64),
        Scheme::AesBaseline(b) => (AES_BLOCK_BITS, b.enc_cycles, b.dec_cycles),
    };
    let dec_words = spec.total_weight_bits().div_ceil(word_bits);
    let enc_words = spec.encrypted_output_bits(traffic).div_ceil(word_bits);
    SchemeLatency::new(enc_words as f64 * enc_per_word, dec_words as f64 * dec_per_word)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadReduction {
    pub workload: String,
    pub aes: SchemeLatency,
    pub in_situ: SchemeLatency,
    pub reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub traffic: TrafficMode,
    pub workloads: Vec<WorkloadReduction>,
    pub average_reduction: f64,
}

/// `1 - in_situ / aes` total latency; 0 when there is no traffic.
pub fn reduction(in_situ: &SchemeLatency, aes: &SchemeLatency) -> f64 {
    if aes.total_cycles == 0.0 {
        return 0.0;
    }
    1.0 - in_situ.total_cycles / aes.total_cycles
}

pub fn reduction_report(
    specs: &[WorkloadSpec],
    cfg: &PerfConfig,
    baseline: &BaselineCosts,
    traffic: TrafficMode,
) -> Result<ReductionReport> {
    if specs.is_empty() {
        return Err(Error::Empty("workload"));
    }
    cfg.validate()?;
    let workloads: Vec<_> = specs
        .iter()
        .map(|spec| {
            let aes = scheme_latency(spec, &Scheme::AesBaseline(*baseline), traffic);
            let in_situ = scheme_latency(spec, &Scheme::InSitu(*cfg), traffic);
            WorkloadReduction {
                workload: spec.name.clone(),
                reduction: reduction(&in_situ, &aes),
                aes,
                in_situ,
            }
        })
        .collect();
    let average_reduction = workloads.iter().map(|w| w.reduction).sum::<f64>() / workloads.len() as f64;
    Ok(ReductionReport {
        traffic,
        workloads,
        average_reduction,
    })
}
