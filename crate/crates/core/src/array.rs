//! Arrays of 2-FeFET cells under AND, NAND or NOR organization.
//!
//! Logical row `r` maps to two physical FeFET rows: the top devices sit on
//! physical row `2r`, the bottom devices on `2r + 1`. Writes follow the
//! block-erase-then-program sequence: an erase resets every device of a block
//! to HVT, then selected devices are programmed to LVT one physical row at a
//! time.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, FeFetDevice, PulsePolarity, VthState, DEFAULT_V_READ};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Topology {
    And,
    Nand,
    Nor,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::And, Topology::Nand, Topology::Nor];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub rows_logical: usize,
    pub cols: usize,
    pub topology: Topology,
    pub device: DeviceParams,
    pub sense_threshold: f64,
    pub num_sense_amps: usize,
    /// Logical rows per erase block.
    pub block_rows: usize,
    #[serde(default)]
    pub read_voltages: ReadVoltages,
}

/// Read voltages: `v_r` for AND/NOR arrays, `v_r1 > v_r2` for NAND strings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadVoltages {
    pub v_r: f64,
    pub v_r1: f64,
    pub v_r2: f64,
}

impl Default for ReadVoltages {
    fn default() -> Self {
        Self {
            v_r: DEFAULT_V_READ,
            v_r1: 2.0,
            v_r2: 0.9,
        }
    }
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self::new(128, 128, Topology::And)
    }
}

impl ArrayConfig {
    /// A single-block array with default device parameters, 16 sense
    /// amplifiers and the default sense threshold.
    pub fn new(rows_logical: usize, cols: usize, topology: Topology) -> Self {
        let device = DeviceParams::default();
        Self {
            rows_logical,
            cols,
            topology,
            sense_threshold: default_sense_threshold(&device),
            device,
            num_sense_amps: 16,
            block_rows: rows_logical.max(1),
            read_voltages: ReadVoltages::default(),
        }
    }

    pub fn with_device(mut self, device: DeviceParams) -> Self {
        self.sense_threshold = default_sense_threshold(&device);
        self.device = device;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        if self.rows_logical == 0 || self.cols == 0 {
            return Err(Error::InvalidParams("array needs at least one row and one column"));
        }
        if self.num_sense_amps == 0 {
            return Err(Error::InvalidParams("at least one sense amplifier is required"));
        }
        if self.block_rows == 0 {
            return Err(Error::InvalidParams("erase blocks need at least one row"));
        }
        if !(self.device.i_off < self.sense_threshold && self.sense_threshold < self.device.i_on) {
            return Err(Error::InvalidParams("sense threshold must lie between i_off and i_on"));
        }
        Ok(())
    }

    pub fn num_blocks(&self) -> usize {
        self.rows_logical.div_ceil(self.block_rows)
    }

    pub fn block_of(&self, row: usize) -> usize {
        row / self.block_rows
    }
}

/// Geometric mean of `i_on` and the two-device leakage `2 * i_off`.
pub fn default_sense_threshold(device: &DeviceParams) -> f64 {
    libm::sqrt(device.i_on * 2.0 * device.i_off)
}

/// Sense cycles for one row: every phase walks all column groups through the
/// shared sense amplifiers.
pub fn sense_cycles(cols: usize, num_sense_amps: usize, phases: usize) -> usize {
    cols.div_ceil(num_sense_amps) * phases
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub top: FeFetDevice,
    pub bottom: FeFetDevice,
}

impl Cell {
    pub fn device(&self, which: Which) -> &FeFetDevice {
        match which {
            Which::Top => &self.top,
            Which::Bottom => &self.bottom,
        }
    }

    fn device_mut(&mut self, which: Which) -> &mut FeFetDevice {
        match which {
            Which::Top => &mut self.top,
            Which::Bottom => &mut self.bottom,
        }
    }

    pub fn states(&self) -> (VthState, VthState) {
        (self.top.state, self.bottom.state)
    }

    /// Exactly one of the two devices is LVT.
    pub fn is_complementary(&self) -> bool {
        self.top.state != self.bottom.state
    }
}

/// Gate voltages applied to the two devices of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasPattern {
    pub top_gate: f64,
    pub bottom_gate: f64,
}

impl BiasPattern {
    pub fn new(top_gate: f64, bottom_gate: f64) -> Self {
        Self {
            top_gate,
            bottom_gate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseResult {
    pub bits: Vec<bool>,
    pub cycles: usize,
}

/// Erase and program cycle counters accumulated by write sequences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriteCounters {
    pub erase_cycles: u64,
    pub program_cycles: u64,
}

impl WriteCounters {
    pub fn total(&self) -> u64 {
        self.erase_cycles + self.program_cycles
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryArray {
    config: ArrayConfig,
    cells: Vec<Cell>,
    /// Blocks erased in the currently open write transaction.
    erased: Vec<bool>,
    counters: WriteCounters,
}

impl MemoryArray {
    /// A freshly manufactured array: every device at nominal HVT.
    pub fn new(config: ArrayConfig) -> Result<Self> {
        config.validate()?;
        let hvt = FeFetDevice::nominal(VthState::Hvt, &config.device);
        let cells = alloc::vec![Cell { top: hvt, bottom: hvt }; config.rows_logical * config.cols];
        Ok(Self {
            erased: alloc::vec![false; config.num_blocks()],
            config,
            cells,
            counters: WriteCounters::default(),
        })
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.config
    }

    pub fn rows(&self) -> usize {
        self.config.rows_logical
    }

    pub fn cols(&self) -> usize {
        self.config.cols
    }

    pub fn counters(&self) -> WriteCounters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = WriteCounters::default();
    }

    fn check_cell(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows() || col >= self.cols() {
            return Err(Error::CellOutOfRange {
                row,
                col,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(row * self.cols() + col)
    }

    pub fn cell(&self, row: usize, col: usize) -> Result<&Cell> {
        let idx = self.check_cell(row, col)?;
        Ok(&self.cells[idx])
    }

    /// Overwrites a cell directly, bypassing the write sequence. Used when
    /// restoring a dumped array.
    pub fn set_cell(&mut self, row: usize, col: usize, cell: Cell) -> Result<()> {
        let idx = self.check_cell(row, col)?;
        self.cells[idx] = cell;
        Ok(())
    }

    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize), &Cell)> {
        let cols = self.cols();
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| ((i / cols, i % cols), c))
    }

    /// Resets every device of `block_index` to HVT and opens the block for
    /// programming.
    pub fn erase_block<R: Rng + ?Sized>(&mut self, block_index: usize, rng: &mut R) -> Result<()> {
        let blocks = self.config.num_blocks();
        if block_index >= blocks {
            return Err(Error::BlockOutOfRange {
                index: block_index,
                blocks,
            });
        }
        let first = block_index * self.config.block_rows;
        let last = (first + self.config.block_rows).min(self.rows());
        let params = self.config.device;
        for cell in &mut self.cells[first * self.config.cols..last * self.config.cols] {
            cell.top.program(PulsePolarity::Negative, &params, rng);
            cell.bottom.program(PulsePolarity::Negative, &params, rng);
        }
        self.erased[block_index] = true;
        self.counters.erase_cycles += 1;
        Ok(())
    }

    /// Programs each target device to LVT. All targets are checked before any
    /// device changes. One program cycle is charged per distinct physical row.
    pub fn program_selected<R: Rng + ?Sized>(
        &mut self,
        targets: &[(usize, usize, Which)],
        rng: &mut R,
    ) -> Result<()> {
        for &(row, col, _) in targets {
            self.check_cell(row, col)?;
            let block = self.config.block_of(row);
            if !self.erased[block] {
                return Err(Error::BlockNotErased(block));
            }
        }
        let params = self.config.device;
        let mut physical_rows: Vec<usize> = Vec::new();
        for &(row, col, which) in targets {
            let idx = row * self.cols() + col;
            self.cells[idx]
                .device_mut(which)
                .program(PulsePolarity::Positive, &params, rng);
            physical_rows.push(2 * row + (which == Which::Bottom) as usize);
        }
        physical_rows.sort_unstable();
        physical_rows.dedup();
        self.counters.program_cycles += physical_rows.len() as u64;
        Ok(())
    }

    /// Closes the open write transaction; further programming needs a new
    /// erase.
    pub fn end_write(&mut self) {
        self.erased.iter_mut().for_each(|e| *e = false);
    }

    pub fn read_cell_current(&self, row: usize, col: usize, bias: BiasPattern) -> Result<f64> {
        let cell = self.cell(row, col)?;
        let p = &self.config.device;
        let top = cell.top.drain_current(bias.top_gate, p);
        let bottom = cell.bottom.drain_current(bias.bottom_gate, p);
        Ok(match self.config.topology {
            // Two parallel paths onto one sensed line.
            Topology::And | Topology::Nor => top + bottom,
            // Series string: the weaker device limits the current.
            Topology::Nand => top.min(bottom),
        })
    }

    fn sense(&self, row: usize, col: usize, bias: BiasPattern) -> Result<bool> {
        Ok(self.read_cell_current(row, col, bias)? > self.config.sense_threshold)
    }

    /// Senses a whole row with per-column biases over `phases` read phases.
    pub fn sense_row(&self, row: usize, biases: &[BiasPattern], phases: usize) -> Result<SenseResult> {
        if biases.len() != self.cols() {
            return Err(Error::LengthMismatch {
                expected: self.cols(),
                actual: biases.len(),
            });
        }
        if !(1..=2).contains(&phases) {
            return Err(Error::InvalidPhases(phases));
        }
        let bits = biases
            .iter()
            .enumerate()
            .map(|(col, &bias)| self.sense(row, col, bias))
            .collect::<Result<Vec<_>>>()?;
        Ok(SenseResult {
            bits,
            cycles: sense_cycles(self.cols(), self.config.num_sense_amps, phases),
        })
    }

    /// One read phase: a single wordline bias applied to the row, sensing
    /// only the selected columns into `out`.
    pub fn sense_phase(
        &self,
        row: usize,
        bias: BiasPattern,
        selected: impl Fn(usize) -> bool,
        out: &mut [bool],
    ) -> Result<()> {
        if out.len() != self.cols() {
            return Err(Error::LengthMismatch {
                expected: self.cols(),
                actual: out.len(),
            });
        }
        for (col, slot) in out.iter_mut().enumerate() {
            if selected(col) {
                *slot = self.sense(row, col, bias)?;
            }
        }
        Ok(())
    }

    pub fn to_dump(&self) -> ArrayDump {
        ArrayDump {
            config: self.config.clone(),
            cells: self.cells.chunks(self.cols()).map(<[Cell]>::to_vec).collect(),
        }
    }

    pub fn from_dump(dump: ArrayDump) -> Result<Self> {
        let mut array = Self::new(dump.config)?;
        if dump.cells.len() != array.rows() {
            return Err(Error::LengthMismatch {
                expected: array.rows(),
                actual: dump.cells.len(),
            });
        }
        for (r, row) in dump.cells.into_iter().enumerate() {
            if row.len() != array.cols() {
                return Err(Error::LengthMismatch {
                    expected: array.cols(),
                    actual: row.len(),
                });
            }
            for (c, cell) in row.into_iter().enumerate() {
                array.set_cell(r, c, cell)?;
            }
        }
        Ok(array)
    }
}

/// Serializable snapshot of an array: configuration plus per-cell device
/// states and effective V_TH values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayDump {
    pub config: ArrayConfig,
    pub cells: Vec<Vec<Cell>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn two_block_array() -> MemoryArray {
        let mut cfg = ArrayConfig::new(4, 3, Topology::And);
        cfg.block_rows = 2;
        MemoryArray::new(cfg).unwrap()
    }

    fn program_all(array: &mut MemoryArray, which: Which, r: &mut ChaCha8Rng) {
        let targets: Vec<_> = (0..array.rows())
            .flat_map(|row| (0..array.cols()).map(move |col| (row, col, which)))
            .collect();
        for b in 0..array.config().num_blocks() {
            array.erase_block(b, r).unwrap();
        }
        array.program_selected(&targets, r).unwrap();
        array.end_write();
    }

    #[test]
    fn erase_resets_block_to_hvt() {
        let mut r = rng();
        let mut a = two_block_array();
        program_all(&mut a, Which::Top, &mut r);
        a.erase_block(0, &mut r).unwrap();
        for ((row, _), cell) in a.cells() {
            if row < 2 {
                assert_eq!(cell.states(), (VthState::Hvt, VthState::Hvt));
            } else {
                assert_eq!(cell.states(), (VthState::Lvt, VthState::Hvt));
            }
        }
        let snapshot = a.clone();
        a.erase_block(0, &mut r).unwrap();
        assert!(a.cells().zip(snapshot.cells()).all(|((_, x), (_, y))| x.states() == y.states()));
        assert_eq!(
            a.erase_block(2, &mut r),
            Err(Error::BlockOutOfRange { index: 2, blocks: 2 })
        );
    }

    #[test]
    fn erase_second_block_leaves_first_untouched() {
        let mut r = rng();
        let mut a = two_block_array();
        program_all(&mut a, Which::Bottom, &mut r);
        a.erase_block(1, &mut r).unwrap();
        for ((row, _), cell) in a.cells() {
            let expected = if row < 2 { VthState::Lvt } else { VthState::Hvt };
            assert_eq!(cell.bottom.state, expected);
        }
    }

    #[test]
    fn program_selected_targets_only() {
        let mut r = rng();
        let mut a = two_block_array();
        a.erase_block(0, &mut r).unwrap();
        let before = a.clone();
        a.program_selected(&[], &mut r).unwrap();
        assert_eq!(a, before);

        a.program_selected(&[(0, 0, Which::Top)], &mut r).unwrap();
        assert_eq!(a.cell(0, 0).unwrap().states(), (VthState::Lvt, VthState::Hvt));
        assert_eq!(a.cells().filter(|(_, c)| c.top.state == VthState::Lvt).count(), 1);
        assert_eq!(a.counters(), WriteCounters { erase_cycles: 1, program_cycles: 1 });
    }

    #[test]
    fn program_requires_erase_and_range() {
        let mut r = rng();
        let mut a = two_block_array();
        assert_eq!(
            a.program_selected(&[(0, 0, Which::Top)], &mut r),
            Err(Error::BlockNotErased(0))
        );
        a.erase_block(0, &mut r).unwrap();
        assert_eq!(
            a.program_selected(&[(2, 0, Which::Top)], &mut r),
            Err(Error::BlockNotErased(1))
        );
        assert!(matches!(
            a.program_selected(&[(0, 0, Which::Top), (0, 9, Which::Top)], &mut r),
            Err(Error::CellOutOfRange { .. })
        ));
        // nothing applied when any target is invalid
        assert_eq!(a.cell(0, 0).unwrap().top.state, VthState::Hvt);
        a.end_write();
        assert_eq!(
            a.program_selected(&[(0, 0, Which::Top)], &mut r),
            Err(Error::BlockNotErased(0))
        );
    }

    fn single_cell(topology: Topology, top: VthState, bottom: VthState) -> MemoryArray {
        let cfg = ArrayConfig::new(1, 1, topology);
        let mut a = MemoryArray::new(cfg).unwrap();
        let p = a.config().device;
        a.set_cell(
            0,
            0,
            Cell {
                top: FeFetDevice::nominal(top, &p),
                bottom: FeFetDevice::nominal(bottom, &p),
            },
        )
        .unwrap();
        a
    }

    #[test]
    fn cell_currents_follow_topology() {
        let p = DeviceParams::default();
        let and = single_cell(Topology::And, VthState::Lvt, VthState::Hvt);
        let i = and.read_cell_current(0, 0, BiasPattern::new(DEFAULT_V_READ, 0.0)).unwrap();
        assert!((i - (p.i_on + p.i_off)).abs() < 1e-18);
        let i = and.read_cell_current(0, 0, BiasPattern::new(0.0, DEFAULT_V_READ)).unwrap();
        assert!((i - 2.0 * p.i_off).abs() < 1e-24);

        let nand = single_cell(Topology::Nand, VthState::Hvt, VthState::Lvt);
        let i = nand.read_cell_current(0, 0, BiasPattern::new(2.0, 0.9)).unwrap();
        assert_eq!(i, p.i_on);
        let i = nand.read_cell_current(0, 0, BiasPattern::new(0.9, 2.0)).unwrap();
        assert_eq!(i, p.i_off);
        assert!(nand.read_cell_current(1, 0, BiasPattern::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn sense_row_cycles_and_errors() {
        let a = MemoryArray::new(ArrayConfig::new(1, 128, Topology::And)).unwrap();
        let biases = alloc::vec![BiasPattern::new(DEFAULT_V_READ, 0.0); 128];
        assert_eq!(a.sense_row(0, &biases, 2).unwrap().cycles, 16);
        assert_eq!(a.sense_row(0, &biases, 1).unwrap().cycles, 8);
        assert!(a.sense_row(0, &biases[..5], 1).is_err());
        assert_eq!(a.sense_row(0, &biases, 3), Err(Error::InvalidPhases(3)));

        let mut cfg = ArrayConfig::new(1, 1, Topology::Nor);
        cfg.num_sense_amps = 1;
        let a = MemoryArray::new(cfg).unwrap();
        assert_eq!(a.sense_row(0, &biases[..1], 1).unwrap().cycles, 1);
    }

    #[test]
    fn sense_cycle_formula_exhaustive() {
        for cols in 1..=64 {
            for sas in 1..=64 {
                for phases in 1..=2 {
                    let mut groups = 0;
                    let mut c = 0;
                    while c < cols {
                        groups += 1;
                        c += sas;
                    }
                    assert_eq!(sense_cycles(cols, sas, phases), groups * phases);
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(ArrayConfig::default().validate().is_ok());
        let mut cfg = ArrayConfig::default();
        cfg.num_sense_amps = 0;
        assert!(MemoryArray::new(cfg).is_err());
        let mut cfg = ArrayConfig::default();
        cfg.sense_threshold = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ArrayConfig::default();
        cfg.cols = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn topology_current_laws() {
        let p = DeviceParams::default();
        let states = [VthState::Lvt, VthState::Hvt];
        let volts = [0.0, 0.6, 0.9, 2.0];
        for topology in Topology::ALL {
            for &t in &states {
                for &b in &states {
                    let a = single_cell(topology, t, b);
                    let cell = *a.cell(0, 0).unwrap();
                    for &vt in &volts {
                        for &vb in &volts {
                            let it = cell.top.drain_current(vt, &p);
                            let ib = cell.bottom.drain_current(vb, &p);
                            let i = a.read_cell_current(0, 0, BiasPattern::new(vt, vb)).unwrap();
                            match topology {
                                Topology::Nand => assert!(i <= it.min(ib)),
                                _ => assert!(i >= it.max(ib)),
                            }
                        }
                    }
                }
            }
        }
    }
}
