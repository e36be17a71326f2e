use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, the arithmetic compilers and the NTT engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("subarray dimensions {rows}x{cols} too small (need rows >= 8, cols >= 4)")]
    DimensionTooSmall { rows: usize, cols: usize },

    #[error("row address {addr} out of range (rows = {rows})")]
    RowOutOfRange { addr: usize, rows: usize },

    #[error("row width mismatch: expected {expected} columns, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("activation requires two distinct rows, got {0} twice")]
    SameRowActivation(usize),

    #[error("invalid tile geometry: width {width}, origin {origin}, columns {cols}")]
    InvalidTileGeometry { width: usize, origin: usize, cols: usize },

    #[error("invalid Montgomery parameters: {0}")]
    InvalidModulus(String),

    #[error("operand {value} out of range for {bits}-bit word")]
    OperandOutOfRange { value: u128, bits: u32 },

    #[error("modulus {modulus} leaves no headroom bit in a {bits}-bit word")]
    NoHeadroom { modulus: u64, bits: u32 },

    #[error("{q} is not prime")]
    NotPrime { q: u64 },

    #[error("no primitive {two_n}-th root of unity modulo {q} ({q} != 1 mod {two_n})")]
    NoRoot { q: u64, two_n: u64 },

    #[error("invalid ring parameters: {0}")]
    InvalidRing(String),

    #[error("capacity exceeded: {needed} coefficient slots needed, {available} available")]
    CapacityExceeded { needed: usize, available: usize },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operation not supported by this backend: {0}")]
    Unsupported(&'static str),

    #[error("trace parse error at line {line}: {msg}")]
    TraceParse { line: usize, msg: String },

    #[error("replay diverged at op {seq}: {msg}")]
    ReplayDiverged { seq: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
