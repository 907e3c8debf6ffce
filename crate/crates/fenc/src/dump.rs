//! Array state dumps: `{"config": {...}, "cells": [[{"top": {"state": "LVT",
//! "vth": 0.3}, "bottom": {...}}, ...], ...]}`. Floats are written in
//! shortest round-trip form, so a dump reloads bit-exactly.

use std::path::Path;

use fenc_core::array::{ArrayDump, MemoryArray};

use crate::report::write_atomic;
use crate::{FencError, Result};

pub fn to_json(array: &MemoryArray) -> String {
    let mut s = serde_json::to_string_pretty(&array.to_dump()).expect("array dump serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str, origin: &Path) -> Result<MemoryArray> {
    let dump: ArrayDump = serde_json::from_str(text).map_err(|e| FencError::json(origin, e))?;
    Ok(MemoryArray::from_dump(dump)?)
}

pub fn save(array: &MemoryArray, path: &Path) -> Result<()> {
    write_atomic(path, to_json(array).as_bytes())
}

pub fn load(path: &Path) -> Result<MemoryArray> {
    let text = std::fs::read_to_string(path).map_err(|e| FencError::io(path, e))?;
    from_json(&text, path)
}
