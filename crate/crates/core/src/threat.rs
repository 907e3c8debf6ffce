//! Attacker readout with guessed keys and Monte Carlo accuracy statistics.
//!
//! The attacker is assumed to have noiseless current sensing of every cell
//! and full control of the read biases. What they lack is the key.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::array::{ArrayConfig, MemoryArray, Topology};
use crate::cipher::{decrypt_read, encrypt_write, encrypt_write_blocks, KeyGranularity, KeyShape, KeyStore};
use crate::device::DeviceParams;
use crate::{BitMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AttackScenario {
    CorrectKeys,
    AllZeroKeys,
    RandomKeys { seed: u64 },
}

impl AttackScenario {
    fn guess(&self, true_keys: &KeyStore, trial: u64) -> KeyStore {
        match *self {
            AttackScenario::CorrectKeys => true_keys.clone(),
            AttackScenario::AllZeroKeys => KeyStore::zeros(true_keys.granularity(), true_keys.shape()),
            AttackScenario::RandomKeys { seed } => {
                let mut rng = trial_rng(seed, trial);
                KeyStore::random(true_keys.granularity(), true_keys.shape(), &mut rng)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PtPattern {
    #[default]
    Uniform,
    Checkerboard,
}

/// Setup shared by every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub array: ArrayConfig,
    pub granularity: KeyGranularity,
    pub pt_pattern: PtPattern,
}

impl Default for TrialConfig {
    /// One 128-bit AND row with bit-wise keys.
    fn default() -> Self {
        Self {
            array: ArrayConfig::new(1, 128, Topology::And),
            granularity: KeyGranularity::PerBit,
            pt_pattern: PtPattern::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub accuracy: f64,
    /// Fraction of cells whose guessed key bit equals the true one.
    pub key_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub scenario: AttackScenario,
    pub trials: usize,
    pub bits_per_trial: usize,
    pub master_seed: u64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub per_trial: Vec<TrialOutcome>,
}

/// Independent random stream for `(seed, index)`; order of evaluation does
/// not matter.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Full-array readout using `keys_guess` as the read-bias key.
pub fn attack_readout(array: &MemoryArray, keys_guess: &KeyStore) -> Result<BitMatrix> {
    decrypt_read(array, 0, array.rows(), keys_guess).map(|(bits, _)| bits)
}

/// Fraction of positions where `recovered` matches `pt`.
pub fn accuracy(recovered: &BitMatrix, pt: &BitMatrix) -> Result<f64> {
    recovered.same_shape(pt)?;
    if pt.is_empty() {
        return Err(Error::Empty("bit"));
    }
    let matches = recovered
        .as_slice()
        .iter()
        .zip(pt.as_slice())
        .filter(|(a, b)| a == b)
        .count();
    Ok(matches as f64 / pt.len() as f64)
}

pub fn run_trial(config: &TrialConfig, scenario: AttackScenario, master_seed: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(master_seed, trial);
    let mut array = MemoryArray::new(config.array.clone())?;
    let shape = KeyShape::of(&config.array);
    let rows = config.array.rows_logical;
    let cols = config.array.cols;
    let pt = match config.pt_pattern {
        PtPattern::Uniform => BitMatrix::random(rows, cols, &mut rng),
        PtPattern::Checkerboard => BitMatrix::checkerboard(rows, cols),
    };
    let keys = KeyStore::random(config.granularity, shape, &mut rng);
    encrypt_write_blocks(&mut array, &pt, &keys, &mut rng)?;
    let guess = scenario.guess(&keys, trial);
    let recovered = attack_readout(&array, &guess)?;
    let truth = keys.expand(0, rows, cols);
    let guessed = guess.expand(0, rows, cols);
    Ok(TrialOutcome {
        trial,
        accuracy: accuracy(&recovered, &pt)?,
        key_agreement: accuracy(&guessed, &truth)?,
    })
}

/// Runs `n_trials` independent trials with fresh plaintext and true keys.
pub fn run_trials(config: &TrialConfig, scenario: AttackScenario, n_trials: usize, master_seed: u64) -> Result<AttackReport> {
    if n_trials == 0 {
        return Err(Error::Empty("trial"));
    }
    config.array.validate()?;
    let per_trial = (0..n_trials as u64)
        .map(|t| run_trial(config, scenario, master_seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(scenario, config, master_seed, per_trial))
}

/// Builds a report from trial outcomes, e.g. ones computed in parallel.
pub fn summarize(scenario: AttackScenario, config: &TrialConfig, master_seed: u64, per_trial: Vec<TrialOutcome>) -> AttackReport {
    let n = per_trial.len().max(1) as f64;
    let mean = per_trial.iter().map(|t| t.accuracy).sum::<f64>() / n;
    let var = per_trial.iter().map(|t| (t.accuracy - mean) * (t.accuracy - mean)).sum::<f64>() / n;
    AttackReport {
        scenario,
        trials: per_trial.len(),
        bits_per_trial: config.array.rows_logical * config.array.cols,
        master_seed,
        accuracy_mean: mean,
        accuracy_std: libm::sqrt(var),
        per_trial,
    }
}

/// `mean ± sigmas·sd` of the fraction of successes of Binomial(`n`, `p`).
pub fn binomial_fraction_band(n: usize, p: f64, sigmas: f64) -> (f64, f64) {
    let sd = libm::sqrt(p * (1.0 - p) / n as f64);
    (p - sigmas * sd, p + sigmas * sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerResult {
    pub vth_sigma: f64,
    pub bits: usize,
    pub errors: usize,
}

impl BerResult {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

/// Bit error rate of correct-key decryption for a `rows x cols` array whose
/// devices carry V_TH variability `device.vth_sigma`.
pub fn bit_error_rate(
    topology: Topology,
    device: DeviceParams,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<BerResult> {
    let config = ArrayConfig::new(rows, cols, topology).with_device(device);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut array = MemoryArray::new(config)?;
    let pt = BitMatrix::random(rows, cols, &mut rng);
    let keys = KeyStore::random(KeyGranularity::PerBit, KeyShape::of(array.config()), &mut rng);
    encrypt_write(&mut array, 0, &pt, &keys, &mut rng)?;
    let (read, _) = decrypt_read(&array, 0, rows, &keys)?;
    let errors = read
        .as_slice()
        .iter()
        .zip(pt.as_slice())
        .filter(|(a, b)| a != b)
        .count();
    Ok(BerResult {
        vth_sigma: device.vth_sigma,
        bits: pt.len(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        let m = BitMatrix::checkerboard(3, 4);
        let inv = BitMatrix::from_fn(3, 4, |r, c| !m.get(r, c));
        assert_eq!(accuracy(&m, &m).unwrap(), 1.0);
        assert_eq!(accuracy(&inv, &m).unwrap(), 0.0);
        assert!(accuracy(&BitMatrix::zeros(2, 2), &m).is_err());
    }

    #[test]
    fn correct_keys_always_recover() {
        let report = run_trials(&TrialConfig::default(), AttackScenario::CorrectKeys, 20, 5).unwrap();
        assert_eq!(report.accuracy_mean, 1.0);
        assert_eq!(report.accuracy_std, 0.0);
        assert!(report.per_trial.iter().all(|t| t.accuracy == 1.0));
    }

    #[test]
    fn trial_accuracy_equals_key_agreement() {
        let config = TrialConfig {
            array: ArrayConfig::new(4, 7, Topology::And),
            pt_pattern: PtPattern::Checkerboard,
            ..Default::default()
        };
        for scenario in [AttackScenario::AllZeroKeys, AttackScenario::RandomKeys { seed: 77 }] {
            let report = run_trials(&config, scenario, 50, 123).unwrap();
            for t in &report.per_trial {
                assert_eq!(t.accuracy, t.key_agreement);
            }
        }
    }

    #[test]
    fn trials_are_order_independent() {
        let config = TrialConfig::default();
        let scenario = AttackScenario::RandomKeys { seed: 4 };
        let report = run_trials(&config, scenario, 8, 99).unwrap();
        let single = run_trial(&config, scenario, 99, 5).unwrap();
        assert_eq!(report.per_trial[5], single);
        assert!(run_trials(&config, scenario, 0, 99).is_err());
    }

    #[test]
    fn multi_block_trials() {
        let mut array = ArrayConfig::new(6, 5, Topology::Nand);
        array.block_rows = 4;
        let config = TrialConfig {
            array,
            granularity: KeyGranularity::PerBlock,
            pt_pattern: PtPattern::Uniform,
        };
        let report = run_trials(&config, AttackScenario::CorrectKeys, 5, 1).unwrap();
        assert_eq!(report.accuracy_mean, 1.0);
        assert_eq!(report.bits_per_trial, 30);
    }

    #[test]
    fn ber_is_zero_without_variability() {
        for topology in Topology::ALL {
            let r = bit_error_rate(topology, DeviceParams::default(), 20, 20, 3).unwrap();
            assert_eq!(r.errors, 0);
            assert_eq!(r.bits, 400);
        }
    }
}
