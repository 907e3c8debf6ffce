//! Behavioral model of a FeFET memory array that encrypts data in place.
//!
//! Each stored bit occupies a cell of two FeFETs holding complementary
//! threshold-voltage states. Writes store `plaintext ^ key` as the cell
//! pattern; reads apply a key-dependent gate bias so that the sensed current
//! already equals the plaintext. Without the key, the array reads back
//! `plaintext ^ key ^ guess`.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. File formats,
//! configuration and the command-line front end live in the `fenc` crate.
//!
//! - [`device`]: single FeFET threshold switch.
//! - [`array`]: AND / NAND / NOR arrays of 2-FeFET cells, erase/program/sense.
//! - [`cipher`]: key storage, cell encoding, read-bias generation and the
//!   encrypt-write / decrypt-read sequences.
//! - [`threat`]: wrong-key readout and Monte Carlo accuracy statistics.
//! - [`perfmodel`]: latency/throughput comparison against an AES engine.
//! - [`workloads`]: encryption latency of neural-network weight traffic.
#![no_std]

extern crate alloc;

pub mod array;
pub mod bits;
pub mod cipher;
pub mod device;
mod error;
pub mod perfmodel;
pub mod threat;
pub mod workloads;

pub use bits::BitMatrix;
pub use error::{Error, Result};
