//! Plaintext files: one row per line, each line a string of `0` and `1`.
//! Blank lines and `#` comments are ignored.

use std::path::Path;

use fenc_core::BitMatrix;

use crate::{FencError, Result};

pub fn parse(text: &str, origin: &Path) -> Result<BitMatrix> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(FencError::Usage(format!("{}: plaintext file is empty", origin.display())));
    }
    let cols = rows[0].1.len();
    for &(lineno, line) in &rows {
        if line.len() != cols {
            return Err(FencError::parse(origin, lineno, format!("expected {cols} bits, found {}", line.len())));
        }
        if let Some(ch) = line.chars().find(|c| *c != '0' && *c != '1') {
            return Err(FencError::parse(origin, lineno, format!("'{ch}' is not a bit")));
        }
    }
    let lines: Vec<&str> = rows.iter().map(|r| r.1).collect();
    Ok(BitMatrix::from_row_strings(&lines)?)
}

pub fn load(path: &Path) -> Result<BitMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| FencError::io(path, e))?;
    parse(&text, path)
}

pub fn to_string(bits: &BitMatrix) -> String {
    let mut out = bits.to_row_strings().join("\n");
    out.push('\n');
    out
}
