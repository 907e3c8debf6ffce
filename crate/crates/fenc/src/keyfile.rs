//! Hex key files.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! granularity per-bit        # per-bit | per-row | per-block
//! rows 4
//! cols 7
//! block-rows 4
//! 5c
//! a2
//! 1e
//! 04
//! ```
//!
//! After the header come the key lines:
//!
//! - `per-bit`: one line per row, `ceil(cols / 4)` hex digits. Column 0 is
//!   the most significant bit of the first digit; padding bits in the last
//!   digit must be zero.
//! - `per-row`: one line per row holding `0` or `1`.
//! - `per-block`: one line per erase block (`ceil(rows / block-rows)`)
//!   holding `0` or `1`. Block `b` covers rows `b*block-rows ..`.

use std::fmt::Write as _;
use std::path::Path;

use fenc_core::cipher::{KeyGranularity, KeyShape, KeyStore};

use crate::{FencError, Result};

fn granularity_name(g: KeyGranularity) -> &'static str {
    match g {
        KeyGranularity::PerBit => "per-bit",
        KeyGranularity::PerRow => "per-row",
        KeyGranularity::PerBlock => "per-block",
    }
}

pub fn to_string(keys: &KeyStore) -> String {
    let shape = keys.shape();
    let mut out = String::new();
    writeln!(out, "granularity {}", granularity_name(keys.granularity())).unwrap();
    writeln!(out, "rows {}", shape.rows).unwrap();
    writeln!(out, "cols {}", shape.cols).unwrap();
    writeln!(out, "block-rows {}", shape.block_rows).unwrap();
    match keys.granularity() {
        KeyGranularity::PerBit => {
            for row in keys.bits().chunks(shape.cols) {
                for nibble in row.chunks(4) {
                    let v = nibble.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << (3 - i));
                    out.push(char::from_digit(v, 16).unwrap());
                }
                out.push('\n');
            }
        }
        KeyGranularity::PerRow | KeyGranularity::PerBlock => {
            for &b in keys.bits() {
                out.push(if b { '1' } else { '0' });
                out.push('\n');
            }
        }
    }
    out
}

pub fn parse(text: &str, origin: &Path) -> Result<KeyStore> {
    let err = |line: usize, msg: String| FencError::parse(origin, line, msg);
    let mut granularity = None;
    let mut rows = None;
    let mut cols = None;
    let mut block_rows = None;
    let mut data: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().unwrap_or_default();
        let value = words.next();
        if value.is_none() {
            data.push((lineno, first));
            continue;
        }
        if !data.is_empty() {
            return Err(err(lineno, format!("header field '{first}' after key data")));
        }
        let value = value.unwrap();
        let number = || value.parse::<usize>().map_err(|_| err(lineno, format!("'{value}' is not a count")));
        match first {
            "granularity" => {
                granularity = Some(match value {
                    "per-bit" => KeyGranularity::PerBit,
                    "per-row" => KeyGranularity::PerRow,
                    "per-block" => KeyGranularity::PerBlock,
                    other => return Err(err(lineno, format!("unknown granularity '{other}'"))),
                })
            }
            "rows" => rows = Some(number()?),
            "cols" => cols = Some(number()?),
            "block-rows" => block_rows = Some(number()?),
            other => return Err(err(lineno, format!("unknown header field '{other}'"))),
        }
    }

    let missing = |what: &str| err(0, format!("missing '{what}' header"));
    let granularity = granularity.ok_or_else(|| missing("granularity"))?;
    let rows = rows.ok_or_else(|| missing("rows"))?;
    let cols = cols.ok_or_else(|| missing("cols"))?;
    let block_rows = block_rows.unwrap_or(rows);
    if rows == 0 || cols == 0 || block_rows == 0 {
        return Err(err(0, "rows, cols and block-rows must be positive".into()));
    }
    let shape = KeyShape { rows, cols, block_rows };
    let expected_lines = match granularity {
        KeyGranularity::PerBit | KeyGranularity::PerRow => rows,
        KeyGranularity::PerBlock => shape.num_blocks(),
    };
    if data.len() != expected_lines {
        let line = data.last().map_or(0, |d| d.0);
        return Err(err(line, format!("expected {expected_lines} key lines, found {}", data.len())));
    }

    let mut bits = Vec::with_capacity(shape.key_len(granularity));
    for (lineno, word) in data {
        match granularity {
            KeyGranularity::PerBit => {
                let digits = cols.div_ceil(4);
                if word.len() != digits {
                    return Err(err(lineno, format!("expected {digits} hex digits, found {}", word.len())));
                }
                let mut row = Vec::with_capacity(digits * 4);
                for ch in word.chars() {
                    let v = ch.to_digit(16).ok_or_else(|| err(lineno, format!("'{ch}' is not a hex digit")))?;
                    row.extend((0..4).map(|i| v >> (3 - i) & 1 == 1));
                }
                if row[cols..].iter().any(|&b| b) {
                    return Err(err(lineno, "padding bits must be zero".into()));
                }
                bits.extend_from_slice(&row[..cols]);
            }
            KeyGranularity::PerRow | KeyGranularity::PerBlock => match word {
                "0" => bits.push(false),
                "1" => bits.push(true),
                other => return Err(err(lineno, format!("expected 0 or 1, found '{other}'"))),
            },
        }
    }
    Ok(KeyStore::new(granularity, shape, bits)?)
}

pub fn load(path: &Path) -> Result<KeyStore> {
    let text = std::fs::read_to_string(path).map_err(|e| FencError::io(path, e))?;
    parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fenc_core::threat::trial_rng;
    use proptest::prelude::*;

    #[test]
    fn documented_example() {
        let text = "# key\ngranularity per-bit\nrows 2\ncols 7\n\nfe # row 0\n02\n";
        let keys = parse(text, Path::new("k")).unwrap();
        assert_eq!(keys.granularity(), KeyGranularity::PerBit);
        assert_eq!(keys.shape(), KeyShape { rows: 2, cols: 7, block_rows: 2 });
        let row0: Vec<bool> = (0..7).map(|c| keys.key_bit_for(0, c)).collect();
        assert_eq!(row0, [true, true, true, true, true, true, true]);
        let row1: Vec<bool> = (0..7).map(|c| keys.key_bit_for(1, c)).collect();
        assert_eq!(row1, [false, false, false, false, false, false, true]);
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("k");
        let cases = [
            "rows 1\ncols 4\n0\n",
            "granularity per-bit\nrows 1\ncols 3\nf\n",
            "granularity per-bit\nrows 2\ncols 4\nf\n",
            "granularity per-bit\nrows 1\ncols 4\ng\n",
            "granularity per-row\nrows 1\ncols 4\n2\n",
            "granularity per-word\nrows 1\ncols 4\n0\n",
            "granularity per-row\nrows 1\ncols 4\n1\nrows 2\n",
        ];
        for text in cases {
            assert!(matches!(parse(text, p), Err(FencError::Parse { .. })), "{text:?}");
        }
    }

    #[test]
    fn per_block_lines_follow_block_count() {
        let text = "granularity per-block\nrows 5\ncols 3\nblock-rows 2\n1\n0\n1\n";
        let keys = parse(text, Path::new("k")).unwrap();
        assert!(keys.key_bit_for(1, 0));
        assert!(!keys.key_bit_for(2, 2));
        assert!(keys.key_bit_for(4, 1));
    }

    proptest! {
        #[test]
        fn text_round_trip(
            g in prop::sample::select(KeyGranularity::ALL.to_vec()),
            rows in 1usize..9,
            cols in 1usize..40,
            block_rows in 1usize..5,
            seed in any::<u64>(),
        ) {
            let shape = KeyShape { rows, cols, block_rows };
            let keys = KeyStore::random(g, shape, &mut trial_rng(seed, 0));
            let text = to_string(&keys);
            prop_assert_eq!(parse(&text, Path::new("k")).unwrap(), keys);
        }
    }
}
