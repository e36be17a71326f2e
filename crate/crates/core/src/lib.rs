//! Bit-accurate simulation of number-theoretic transforms computed inside an
//! SRAM subarray with bitline logic and sense-amplifier latch shifts.

pub mod arith;
pub mod bitcell;
pub mod error;

pub use error::{Error, Result};
pub mod oracle;
pub mod ring;
pub mod ntt;
pub mod perf;
pub mod cli;
