//! Host-side companion to `fenc-core`: configuration, key and plaintext
//! files, array dumps, workload descriptors, report writers and the `fenc`
//! command-line tool.

pub mod bitfile;
pub mod cli;
pub mod config;
pub mod dump;
mod error;
pub mod keyfile;
pub mod report;
pub mod workload_io;

pub use error::{FencError, Result};
pub use fenc_core as core;
