//! Analytical latency / throughput model of the in-situ scheme against an
//! AES accelerator baseline.
//!
//! Encryption latency is a calibrated per-word constant. Decryption latency
//! is the sense-amplifier schedule: `ceil(word_bits / SAs)` cycles per read
//! phase, with two phases for bit-wise keys. Decryption throughput is quoted
//! at the single-phase steady state, where the two phases of bit-wise keys
//! overlap across words.

use serde::{Deserialize, Serialize};

use crate::array::sense_cycles;
use crate::cipher::KeyGranularity;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerfConfig {
    pub word_bits: u64,
    pub freq_hz: f64,
    pub num_sense_amps: u64,
    pub array_rows: u64,
    pub array_cols: u64,
    pub enc_cycles_per_word: u64,
    pub key_granularity: KeyGranularity,
}

impl Default for PerfConfig {
    fn default() -> Self {
        Self {
            word_bits: 128,
            freq_hz: 25e6,
            num_sense_amps: 16,
            array_rows: 128,
            array_cols: 128,
            enc_cycles_per_word: 5,
            key_granularity: KeyGranularity::PerBit,
        }
    }
}

impl PerfConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.word_bits,
            self.num_sense_amps,
            self.array_rows,
            self.array_cols,
            self.enc_cycles_per_word,
        ];
        if counts.contains(&0) {
            return Err(Error::InvalidParams("performance counts must be at least 1"));
        }
        if !(self.freq_hz > 0.0 && self.freq_hz.is_finite()) {
            return Err(Error::InvalidParams("clock frequency must be positive"));
        }
        Ok(())
    }
}

/// Published cost of the AES accelerator used as the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineCosts {
    pub enc_cycles: f64,
    pub dec_cycles: f64,
    pub throughput_mbps: f64,
    pub power_mw: f64,
    pub area_mm2: f64,
}

impl Default for BaselineCosts {
    fn default() -> Self {
        Self {
            enc_cycles: 115.5,
            dec_cycles: 117.0,
            throughput_mbps: 28.32,
            power_mw: 0.031,
            area_mm2: 0.00309,
        }
    }
}

pub fn enc_latency(cfg: &PerfConfig) -> u64 {
    cfg.enc_cycles_per_word
}

/// Encryption cycles for `words` consecutive words.
pub fn enc_latency_words(cfg: &PerfConfig, words: u64) -> u64 {
    words * enc_latency(cfg)
}

pub fn dec_latency(cfg: &PerfConfig) -> u64 {
    dec_latency_for(cfg, cfg.key_granularity)
}

pub fn dec_latency_for(cfg: &PerfConfig, granularity: KeyGranularity) -> u64 {
    sense_cycles(cfg.word_bits as usize, cfg.num_sense_amps as usize, granularity.read_phases()) as u64
}

/// Steady-state decryption cycles per word (one sensing pass).
pub fn dec_steady_cycles(cfg: &PerfConfig) -> u64 {
    dec_latency_for(cfg, KeyGranularity::PerBlock)
}

/// `word_bits * freq / cycles`, in megabits per second.
pub fn throughput_mbps(word_bits: u64, cycles_per_word: f64, freq_hz: f64) -> f64 {
    word_bits as f64 * freq_hz / cycles_per_word / 1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMetrics {
    pub scheme: SchemeName,
    pub enc_latency_cycles: f64,
    pub dec_latency_cycles: f64,
    pub enc_throughput_mbps: f64,
    pub dec_throughput_mbps: f64,
    pub power_mw: f64,
    /// `None` when the added area is negligible (XOR gates only).
    pub area_mm2: Option<f64>,
    pub negligible_overhead: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    InSitu,
    Aes,
}

impl SchemeName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeName::InSitu => "in-situ",
            SchemeName::Aes => "aes",
        }
    }
}

impl SchemeMetrics {
    pub fn in_situ(cfg: &PerfConfig) -> Self {
        let enc = enc_latency(cfg) as f64;
        Self {
            scheme: SchemeName::InSitu,
            enc_latency_cycles: enc,
            dec_latency_cycles: dec_latency(cfg) as f64,
            enc_throughput_mbps: throughput_mbps(cfg.word_bits, enc, cfg.freq_hz),
            dec_throughput_mbps: throughput_mbps(cfg.word_bits, dec_steady_cycles(cfg) as f64, cfg.freq_hz),
            power_mw: 0.0,
            area_mm2: None,
            negligible_overhead: true,
        }
    }

    /// Baseline figures are taken as published, not recomputed from cycles.
    pub fn aes(baseline: &BaselineCosts) -> Self {
        Self {
            scheme: SchemeName::Aes,
            enc_latency_cycles: baseline.enc_cycles,
            dec_latency_cycles: baseline.dec_cycles,
            enc_throughput_mbps: baseline.throughput_mbps,
            dec_throughput_mbps: baseline.throughput_mbps,
            power_mw: baseline.power_mw,
            area_mm2: Some(baseline.area_mm2),
            negligible_overhead: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: PerfConfig,
    pub in_situ: SchemeMetrics,
    pub aes: SchemeMetrics,
    /// Single-phase decryption latency, for reference next to the configured
    /// granularity.
    pub dec_latency_single_phase_cycles: u64,
    pub enc_speedup: f64,
    pub dec_speedup: f64,
}

impl ComparisonReport {
    pub fn between(config: PerfConfig, ours: SchemeMetrics, baseline: SchemeMetrics) -> Self {
        Self {
            enc_speedup: ours.enc_throughput_mbps / baseline.enc_throughput_mbps,
            dec_speedup: ours.dec_throughput_mbps / baseline.dec_throughput_mbps,
            dec_latency_single_phase_cycles: dec_steady_cycles(&config),
            config,
            in_situ: ours,
            aes: baseline,
        }
    }
}

pub fn compare(cfg: &PerfConfig, baseline: &BaselineCosts) -> Result<ComparisonReport> {
    cfg.validate()?;
    Ok(ComparisonReport::between(
        *cfg,
        SchemeMetrics::in_situ(cfg),
        SchemeMetrics::aes(baseline),
    ))
}

/// Rounds to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = libm::floor(libm::log10(libm::fabs(x))) as i32;
    let scale = libm::pow(10.0, (digits - 1 - magnitude) as f64);
    libm::round(x * scale) / scale
}
