//! In-situ XOR encryption: key storage, cell encoding and the key-dependent
//! read bias.
//!
//! A ciphertext bit `ct = pt ^ key` is stored as complementary device states
//! (`0` → top LVT / bottom HVT, `1` → top HVT / bottom LVT). Reading applies
//! the read voltage to the top device when the key bit is 1 and to the
//! bottom device when it is 0, so the sensed current encodes `ct ^ key`.
//! Reading with a guessed key therefore returns `pt ^ key ^ guess`.
//!
//! Reusing one key bit across many cells (row or block granularity) exposes
//! the usual XOR weakness: two cells sharing a key leak the XOR of their
//! plaintexts. That property is inherent to the scheme and is not modeled.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::array::{sense_cycles, ArrayConfig, BiasPattern, MemoryArray, ReadVoltages, Topology, Which, WriteCounters};
use crate::device::{DeviceParams, VthState};
use crate::{BitMatrix, Error, Result};

pub use crate::bits::xor_block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyGranularity {
    PerBit,
    PerRow,
    PerBlock,
}

impl KeyGranularity {
    pub const ALL: [KeyGranularity; 3] = [
        KeyGranularity::PerBit,
        KeyGranularity::PerRow,
        KeyGranularity::PerBlock,
    ];

    /// Read phases per row: bit-wise keys need separate key-1 and key-0
    /// phases because the wordline bias differs.
    pub fn read_phases(self) -> usize {
        match self {
            KeyGranularity::PerBit => 2,
            KeyGranularity::PerRow | KeyGranularity::PerBlock => 1,
        }
    }
}

/// Address space a key store covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyShape {
    pub rows: usize,
    pub cols: usize,
    pub block_rows: usize,
}

impl KeyShape {
    pub fn of(config: &ArrayConfig) -> Self {
        Self {
            rows: config.rows_logical,
            cols: config.cols,
            block_rows: config.block_rows,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.rows.div_ceil(self.block_rows.max(1))
    }

    pub fn key_len(&self, granularity: KeyGranularity) -> usize {
        match granularity {
            KeyGranularity::PerBit => self.rows * self.cols,
            KeyGranularity::PerRow => self.rows,
            KeyGranularity::PerBlock => self.num_blocks(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyStore {
    granularity: KeyGranularity,
    shape: KeyShape,
    bits: Vec<bool>,
    encrypted: bool,
}

impl KeyStore {
    pub fn new(granularity: KeyGranularity, shape: KeyShape, bits: Vec<bool>) -> Result<Self> {
        if shape.block_rows == 0 {
            return Err(Error::KeyShape);
        }
        let expected = shape.key_len(granularity);
        if bits.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: bits.len(),
            });
        }
        Ok(Self {
            granularity,
            shape,
            bits,
            encrypted: true,
        })
    }

    pub fn zeros(granularity: KeyGranularity, shape: KeyShape) -> Self {
        let bits = alloc::vec![false; shape.key_len(granularity)];
        Self {
            granularity,
            shape,
            bits,
            encrypted: true,
        }
    }

    pub fn random<R: Rng + ?Sized>(granularity: KeyGranularity, shape: KeyShape, rng: &mut R) -> Self {
        let bits = (0..shape.key_len(granularity)).map(|_| rng.random()).collect();
        Self {
            granularity,
            shape,
            bits,
            encrypted: true,
        }
    }

    /// Plain storage. Behaves exactly like an all-zero block key.
    pub fn unencrypted(shape: KeyShape) -> Self {
        Self {
            encrypted: false,
            ..Self::zeros(KeyGranularity::PerBlock, shape)
        }
    }

    /// Per-bit key store taking each key bit from a matrix covering the whole
    /// array.
    pub fn from_matrix(keys: &BitMatrix, block_rows: usize) -> Result<Self> {
        let shape = KeyShape {
            rows: keys.rows(),
            cols: keys.cols(),
            block_rows,
        };
        Self::new(KeyGranularity::PerBit, shape, keys.as_slice().to_vec())
    }

    pub fn granularity(&self) -> KeyGranularity {
        self.granularity
    }

    pub fn shape(&self) -> KeyShape {
        self.shape
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_encrypted(&self) -> bool {
        self.encrypted
    }

    pub fn key_bit_for(&self, row: usize, col: usize) -> bool {
        match self.granularity {
            KeyGranularity::PerBit => self.bits[row * self.shape.cols + col],
            KeyGranularity::PerRow => self.bits[row],
            KeyGranularity::PerBlock => self.bits[row / self.shape.block_rows],
        }
    }

    /// Expands the key to one bit per cell over `rows` starting at
    /// `start_row`.
    pub fn expand(&self, start_row: usize, rows: usize, cols: usize) -> BitMatrix {
        BitMatrix::from_fn(rows, cols, |r, c| self.key_bit_for(start_row + r, c))
    }

    fn check_covers(&self, config: &ArrayConfig) -> Result<()> {
        if self.shape != KeyShape::of(config) {
            return Err(Error::KeyShape);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellEncoding {
    pub ct_bit: bool,
    pub top_state: VthState,
    pub bottom_state: VthState,
}

impl CellEncoding {
    /// The device that must be programmed to LVT after the block erase.
    pub fn lvt_device(&self) -> Which {
        if self.top_state == VthState::Lvt {
            Which::Top
        } else {
            Which::Bottom
        }
    }
}

pub fn encode_cell(ct_bit: bool) -> CellEncoding {
    let (top_state, bottom_state) = if ct_bit {
        (VthState::Hvt, VthState::Lvt)
    } else {
        (VthState::Lvt, VthState::Hvt)
    };
    CellEncoding {
        ct_bit,
        top_state,
        bottom_state,
    }
}

/// Gate biases that make the sensed current equal `ct ^ key_bit`.
pub fn read_bias_for_key(
    key_bit: bool,
    topology: Topology,
    params: &DeviceParams,
    voltages: &ReadVoltages,
) -> Result<BiasPattern> {
    match topology {
        Topology::And | Topology::Nor => {
            let v_r = voltages.v_r;
            if !(params.vth_low < v_r && v_r < params.vth_high) {
                return Err(Error::BiasOrdering(topology));
            }
            Ok(if key_bit {
                BiasPattern::new(v_r, 0.0)
            } else {
                BiasPattern::new(0.0, v_r)
            })
        }
        Topology::Nand => {
            let ReadVoltages { v_r1, v_r2, .. } = *voltages;
            if !(v_r1 > params.vth_high && params.vth_high > v_r2 && v_r2 > params.vth_low) {
                return Err(Error::BiasOrdering(topology));
            }
            Ok(if key_bit {
                BiasPattern::new(v_r2, v_r1)
            } else {
                BiasPattern::new(v_r1, v_r2)
            })
        }
    }
}

/// Cycle accounting of one encrypt-write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteStats {
    pub counters: WriteCounters,
    pub bits_written: usize,
}

/// Writes `pt ^ key` into `pt.rows()` rows starting at `start_row`, columns
/// `0..pt.cols()`.
///
/// The region must sit inside one erase block. Cells of that block outside
/// the region are read back from the array and restored after the erase.
pub fn encrypt_write<R: Rng + ?Sized>(
    array: &mut MemoryArray,
    start_row: usize,
    pt: &BitMatrix,
    keys: &KeyStore,
    rng: &mut R,
) -> Result<WriteStats> {
    let config = array.config().clone();
    keys.check_covers(&config)?;
    if pt.is_empty() {
        return Err(Error::Empty("plaintext bit"));
    }
    let end_row = start_row + pt.rows();
    if end_row > config.rows_logical || pt.cols() > config.cols {
        return Err(Error::CellOutOfRange {
            row: end_row - 1,
            col: pt.cols() - 1,
            rows: config.rows_logical,
            cols: config.cols,
        });
    }
    let block = config.block_of(start_row);
    if config.block_of(end_row - 1) != block {
        return Err(Error::SpansBlocks {
            start: start_row,
            end: end_row,
            block_rows: config.block_rows,
        });
    }
    let block_start = block * config.block_rows;
    let block_end = (block_start + config.block_rows).min(config.rows_logical);

    let mut targets = Vec::new();
    for row in block_start..block_end {
        for col in 0..config.cols {
            let inside = row >= start_row && row < end_row && col < pt.cols();
            if inside {
                let ct = pt.get(row - start_row, col) ^ keys.key_bit_for(row, col);
                targets.push((row, col, encode_cell(ct).lvt_device()));
            } else {
                let cell = array.cell(row, col)?;
                for which in [Which::Top, Which::Bottom] {
                    if cell.device(which).state == VthState::Lvt {
                        targets.push((row, col, which));
                    }
                }
            }
        }
    }

    let before = array.counters();
    array.erase_block(block, rng)?;
    array.program_selected(&targets, rng)?;
    array.end_write();
    let after = array.counters();
    Ok(WriteStats {
        counters: WriteCounters {
            erase_cycles: after.erase_cycles - before.erase_cycles,
            program_cycles: after.program_cycles - before.program_cycles,
        },
        bits_written: pt.len(),
    })
}

/// Writes a plaintext covering whole rows from row 0, one erase block at a
/// time.
pub fn encrypt_write_blocks<R: Rng + ?Sized>(
    array: &mut MemoryArray,
    pt: &BitMatrix,
    keys: &KeyStore,
    rng: &mut R,
) -> Result<WriteStats> {
    let block_rows = array.config().block_rows;
    let mut total = WriteStats::default();
    let mut start = 0;
    while start < pt.rows() {
        let end = (start + block_rows).min(pt.rows());
        let slice = BitMatrix::from_fn(end - start, pt.cols(), |r, c| pt.get(start + r, c));
        let stats = encrypt_write(array, start, &slice, keys, rng)?;
        total.counters.erase_cycles += stats.counters.erase_cycles;
        total.counters.program_cycles += stats.counters.program_cycles;
        total.bits_written += stats.bits_written;
        start = end;
    }
    if total.bits_written == 0 {
        return Err(Error::Empty("plaintext bit"));
    }
    Ok(total)
}

/// Reads `rows` full rows starting at `start_row`, applying the read bias of
/// `keys` to every cell. Returns the sensed bits and the sense cycles used.
pub fn decrypt_read(
    array: &MemoryArray,
    start_row: usize,
    rows: usize,
    keys: &KeyStore,
) -> Result<(BitMatrix, usize)> {
    let config = array.config();
    keys.check_covers(config)?;
    if start_row + rows > config.rows_logical {
        return Err(Error::CellOutOfRange {
            row: start_row + rows.max(1) - 1,
            col: 0,
            rows: config.rows_logical,
            cols: config.cols,
        });
    }
    let bias = |key| read_bias_for_key(key, config.topology, &config.device, &config.read_voltages);
    let (bias_one, bias_zero) = (bias(true)?, bias(false)?);
    let phases = keys.granularity().read_phases();

    let mut out = BitMatrix::zeros(rows, config.cols);
    let mut line = alloc::vec![false; config.cols];
    let mut cycles = 0;
    for r in 0..rows {
        let row = start_row + r;
        if phases == 2 {
            // Phase 1 senses key-1 columns; its result stays in the merge
            // buffer while phase 2 fills in the key-0 columns.
            array.sense_phase(row, bias_one, |c| keys.key_bit_for(row, c), &mut line)?;
            array.sense_phase(row, bias_zero, |c| !keys.key_bit_for(row, c), &mut line)?;
        } else {
            let b = if keys.key_bit_for(row, 0) { bias_one } else { bias_zero };
            array.sense_phase(row, b, |_| true, &mut line)?;
        }
        for (c, &bit) in line.iter().enumerate() {
            out.set(r, c, bit);
        }
        cycles += sense_cycles(config.cols, config.num_sense_amps, phases);
    }
    Ok((out, cycles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::SlopeMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn encode_cell_mapping() {
        let zero = encode_cell(false);
        assert_eq!((zero.top_state, zero.bottom_state), (VthState::Lvt, VthState::Hvt));
        let one = encode_cell(true);
        assert_eq!((one.top_state, one.bottom_state), (VthState::Hvt, VthState::Lvt));
        for b in [false, true] {
            let e = encode_cell(b);
            let f = encode_cell(!b);
            assert_eq!((e.top_state, e.bottom_state), (f.bottom_state, f.top_state));
        }
        assert_eq!(zero.lvt_device(), Which::Top);
        assert_eq!(one.lvt_device(), Which::Bottom);
    }

    #[test]
    fn read_bias_examples() {
        let p = DeviceParams::default();
        let v = ReadVoltages::default();
        assert_eq!(read_bias_for_key(true, Topology::And, &p, &v).unwrap(), BiasPattern::new(0.6, 0.0));
        assert_eq!(read_bias_for_key(false, Topology::And, &p, &v).unwrap(), BiasPattern::new(0.0, 0.6));
        assert_eq!(read_bias_for_key(true, Topology::Nor, &p, &v).unwrap(), BiasPattern::new(0.6, 0.0));
        assert_eq!(read_bias_for_key(false, Topology::Nand, &p, &v).unwrap(), BiasPattern::new(v.v_r1, v.v_r2));
        assert_eq!(read_bias_for_key(true, Topology::Nand, &p, &v).unwrap(), BiasPattern::new(v.v_r2, v.v_r1));
    }

    #[test]
    fn read_bias_rejects_bad_ordering() {
        let p = DeviceParams::default();
        let low_vr = ReadVoltages { v_r: 0.2, ..Default::default() };
        assert_eq!(
            read_bias_for_key(true, Topology::And, &p, &low_vr),
            Err(Error::BiasOrdering(Topology::And))
        );
        let swapped = ReadVoltages { v_r1: 0.9, v_r2: 2.0, ..Default::default() };
        assert_eq!(
            read_bias_for_key(false, Topology::Nand, &p, &swapped),
            Err(Error::BiasOrdering(Topology::Nand))
        );
    }

    #[test]
    fn key_addressing() {
        let shape = KeyShape { rows: 4, cols: 3, block_rows: 2 };
        let per_row = KeyStore::new(KeyGranularity::PerRow, shape, alloc::vec![true, false, false, true]).unwrap();
        assert!(per_row.key_bit_for(0, 2));
        assert!(!per_row.key_bit_for(1, 0));
        let per_block = KeyStore::new(KeyGranularity::PerBlock, shape, alloc::vec![false, true]).unwrap();
        assert!(!per_block.key_bit_for(1, 1));
        assert!(per_block.key_bit_for(3, 0));
        assert!(KeyStore::new(KeyGranularity::PerBit, shape, alloc::vec![true; 11]).is_err());
        let plain = KeyStore::unencrypted(shape);
        assert!(!plain.is_encrypted());
        assert_eq!(plain.expand(0, 4, 3), BitMatrix::zeros(4, 3));
    }

    #[test]
    fn all_zero_write_gives_lvt_top_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = MemoryArray::new(ArrayConfig::new(3, 5, Topology::And)).unwrap();
        let keys = KeyStore::zeros(KeyGranularity::PerBit, KeyShape::of(a.config()));
        encrypt_write(&mut a, 0, &BitMatrix::zeros(3, 5), &keys, &mut rng).unwrap();
        assert!(a.cells().all(|(_, c)| c.states() == (VthState::Lvt, VthState::Hvt)));
    }

    #[test]
    fn write_region_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cfg = ArrayConfig::new(4, 4, Topology::And);
        cfg.block_rows = 2;
        let mut a = MemoryArray::new(cfg).unwrap();
        let keys = KeyStore::zeros(KeyGranularity::PerRow, KeyShape::of(a.config()));
        let pt = BitMatrix::zeros(2, 4);
        assert!(matches!(
            encrypt_write(&mut a, 1, &pt, &keys, &mut rng),
            Err(Error::SpansBlocks { .. })
        ));
        assert!(encrypt_write(&mut a, 3, &pt, &keys, &mut rng).is_err());
        assert_eq!(
            encrypt_write(&mut a, 0, &BitMatrix::zeros(0, 0), &keys, &mut rng),
            Err(Error::Empty("plaintext bit"))
        );
        let other = KeyStore::zeros(KeyGranularity::PerRow, KeyShape { rows: 4, cols: 4, block_rows: 4 });
        assert_eq!(encrypt_write(&mut a, 0, &pt, &other, &mut rng), Err(Error::KeyShape));
        assert!(decrypt_read(&a, 3, 2, &keys).is_err());
    }

    #[test]
    fn partial_write_restores_rest_of_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = MemoryArray::new(ArrayConfig::new(4, 6, Topology::Nor)).unwrap();
        let keys = KeyStore::random(KeyGranularity::PerBit, KeyShape::of(a.config()), &mut rng);
        let full = BitMatrix::random(4, 6, &mut rng);
        encrypt_write(&mut a, 0, &full, &keys, &mut rng).unwrap();
        let patch = BitMatrix::random(1, 4, &mut rng);
        encrypt_write(&mut a, 2, &patch, &keys, &mut rng).unwrap();
        let (read, _) = decrypt_read(&a, 0, 4, &keys).unwrap();
        for r in 0..4 {
            for c in 0..6 {
                let expected = if r == 2 && c < 4 { patch.get(0, c) } else { full.get(r, c) };
                assert_eq!(read.get(r, c), expected, "({r}, {c})");
            }
        }
    }

    #[test]
    fn write_counters_per_physical_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut a = MemoryArray::new(ArrayConfig::new(2, 4, Topology::And)).unwrap();
        let shape = KeyShape::of(a.config());
        // ct row 0 = 0000 (top row only), ct row 1 = 0101 (both physical rows)
        let pt = BitMatrix::from_row_strings(&["0000", "0101"]).unwrap();
        let stats = encrypt_write(&mut a, 0, &pt, &KeyStore::zeros(KeyGranularity::PerBit, shape), &mut rng).unwrap();
        assert_eq!(stats.counters, WriteCounters { erase_cycles: 1, program_cycles: 3 });
        assert_eq!(stats.bits_written, 8);
    }

    #[test]
    fn decrypt_cycles_per_granularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = MemoryArray::new(ArrayConfig::new(2, 128, Topology::And)).unwrap();
        let shape = KeyShape::of(a.config());
        for (g, per_row) in [
            (KeyGranularity::PerBit, 16),
            (KeyGranularity::PerRow, 8),
            (KeyGranularity::PerBlock, 8),
        ] {
            let keys = KeyStore::random(g, shape, &mut rng);
            assert_eq!(decrypt_read(&a, 0, 1, &keys).unwrap().1, per_row);
            assert_eq!(decrypt_read(&a, 0, 2, &keys).unwrap().1, 2 * per_row);
        }
    }

    #[test]
    fn sigmoid_devices_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let device = DeviceParams {
            slope_mode: SlopeMode::Sigmoid { volts_per_decade: 0.1 },
            ..Default::default()
        };
        for topology in Topology::ALL {
            let cfg = ArrayConfig::new(4, 8, topology).with_device(device);
            let mut a = MemoryArray::new(cfg).unwrap();
            let keys = KeyStore::random(KeyGranularity::PerBit, KeyShape::of(a.config()), &mut rng);
            let pt = BitMatrix::random(4, 8, &mut rng);
            encrypt_write(&mut a, 0, &pt, &keys, &mut rng).unwrap();
            assert_eq!(decrypt_read(&a, 0, 4, &keys).unwrap().0, pt);
        }
    }
}
