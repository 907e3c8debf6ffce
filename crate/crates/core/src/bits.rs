//! Dense row-major bit matrix used for plaintext, ciphertext and readouts.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: alloc::vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                bits.push(f(r, c));
            }
        }
        Self { rows, cols, bits }
    }

    pub fn from_vec(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: bits.len(),
            });
        }
        Ok(Self { rows, cols, bits })
    }

    /// Checkerboard with `1` on cells where `row + col` is even.
    pub fn checkerboard(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| (r + c) % 2 == 0)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| rng.random())
    }

    /// Parses rows written as strings of `'0'` / `'1'`.
    pub fn from_row_strings<S: AsRef<str>>(lines: &[S]) -> Result<Self> {
        let rows = lines.len();
        let cols = lines.first().map_or(0, |l| l.as_ref().len());
        let mut bits = Vec::with_capacity(rows * cols);
        for line in lines {
            let line = line.as_ref();
            if line.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    actual: line.len(),
                });
            }
            for ch in line.chars() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    _ => return Err(Error::InvalidParams("bit rows may only contain '0' and '1'")),
                }
            }
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        self.bits
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.bits[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            bits: xor_block(&self.bits, &other.bits)?,
        })
    }
}

/// Element-wise exclusive-or of two equal-length bit vectors.
pub fn xor_block(data: &[bool], key_bits: &[bool]) -> Result<Vec<bool>> {
    if data.len() != key_bits.len() {
        return Err(Error::LengthMismatch {
            expected: data.len(),
            actual: key_bits.len(),
        });
    }
    Ok(data.iter().zip(key_bits).map(|(&d, &k)| d ^ k).collect())
}
