use serde::{Deserialize, Serialize};

use super::op::{Logic, MicroOp, ShiftDir, ShiftScope};
use super::row::BitRow;
use crate::error::{Error, Result};

/// Something that accepts array micro-ops: the simulated subarray itself, a
/// recorder that compiles a [`CommandStream`], or a counter used for cost
/// sweeps that never touches bits.
pub trait Backend {
    fn write_row(&mut self, row: usize, bits: &BitRow) -> Result<()>;
    fn activate(&mut self, a: usize, b: usize, mode: Logic) -> Result<()>;
    fn shift(&mut self, dir: ShiftDir, scope: ShiftScope) -> Result<()>;
    fn writeback(&mut self, row: usize) -> Result<()>;
    /// True iff every latch bit is 0. Backends that cannot observe data
    /// report `false`, which drives data-dependent loops to their bound.
    fn zero_test(&mut self) -> Result<bool>;

    /// Labels the position in the op sequence; only recorders keep it.
    fn mark(&mut self, _mark: Mark) {}

    fn emit(&mut self, op: &MicroOp) -> Result<()> {
        match op {
            MicroOp::WriteRow { row, bits } => self.write_row(*row, bits),
            MicroOp::Activate { a, b, mode } => self.activate(*a, *b, *mode),
            MicroOp::Shift { dir, scope } => self.shift(*dir, *scope),
            MicroOp::Writeback { row } => self.writeback(*row),
            MicroOp::ZeroTest { .. } => self.zero_test().map(|_| ()),
        }
    }
}

/// Position marker inside a modular multiplication: `step` 1..=7 follows the
/// carry-save step numbering of one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    pub iteration: usize,
    pub step: u8,
}

/// Per-kind micro-op tallies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub write_row: u64,
    pub activate_and: u64,
    pub activate_nor: u64,
    pub activate_or: u64,
    pub activate_xor: u64,
    pub shift_global: u64,
    pub shift_tile: u64,
    pub shift_align: u64,
    pub writeback: u64,
    pub zero_test: u64,
    /// Host reads are not micro-ops; they are tallied for I/O costing only.
    pub host_read: u64,
}

impl OpCounts {
    pub fn record(&mut self, op: &MicroOp) {
        match op {
            MicroOp::WriteRow { .. } => self.write_row += 1,
            MicroOp::Activate { mode, .. } => self.record_activate(*mode),
            MicroOp::Shift { scope, .. } => self.record_shift(*scope),
            MicroOp::Writeback { .. } => self.writeback += 1,
            MicroOp::ZeroTest { .. } => self.zero_test += 1,
        }
    }

    pub(crate) fn record_activate(&mut self, mode: Logic) {
        match mode {
            Logic::And => self.activate_and += 1,
            Logic::Nor => self.activate_nor += 1,
            Logic::Or => self.activate_or += 1,
            Logic::Xor => self.activate_xor += 1,
        }
    }

    pub(crate) fn record_shift(&mut self, scope: ShiftScope) {
        match scope {
            ShiftScope::Global => self.shift_global += 1,
            ShiftScope::Tile { .. } => self.shift_tile += 1,
            ShiftScope::Align => self.shift_align += 1,
        }
    }

    pub fn activations(&self) -> u64 {
        self.activate_and + self.activate_nor + self.activate_or + self.activate_xor
    }

    pub fn shifts(&self) -> u64 {
        self.shift_global + self.shift_tile + self.shift_align
    }

    pub fn micro_ops(&self) -> u64 {
        self.write_row + self.activations() + self.shifts() + self.writeback + self.zero_test
    }

    pub fn merge(&mut self, other: &OpCounts) {
        self.write_row += other.write_row;
        self.activate_and += other.activate_and;
        self.activate_nor += other.activate_nor;
        self.activate_or += other.activate_or;
        self.activate_xor += other.activate_xor;
        self.shift_global += other.shift_global;
        self.shift_tile += other.shift_tile;
        self.shift_align += other.shift_align;
        self.writeback += other.writeback;
        self.zero_test += other.zero_test;
        self.host_read += other.host_read;
    }

    pub fn since(&self, earlier: &OpCounts) -> OpCounts {
        OpCounts {
            write_row: self.write_row - earlier.write_row,
            activate_and: self.activate_and - earlier.activate_and,
            activate_nor: self.activate_nor - earlier.activate_nor,
            activate_or: self.activate_or - earlier.activate_or,
            activate_xor: self.activate_xor - earlier.activate_xor,
            shift_global: self.shift_global - earlier.shift_global,
            shift_tile: self.shift_tile - earlier.shift_tile,
            shift_align: self.shift_align - earlier.shift_align,
            writeback: self.writeback - earlier.writeback,
            zero_test: self.zero_test - earlier.zero_test,
            host_read: self.host_read - earlier.host_read,
        }
    }
}

/// Counts ops without holding any array state.
#[derive(Clone, Debug, Default)]
pub struct OpCounter {
    pub counts: OpCounts,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Backend for OpCounter {
    fn write_row(&mut self, _row: usize, _bits: &BitRow) -> Result<()> {
        self.counts.write_row += 1;
        Ok(())
    }

    fn activate(&mut self, a: usize, b: usize, mode: Logic) -> Result<()> {
        if a == b {
            return Err(Error::SameRowActivation(a));
        }
        self.counts.record_activate(mode);
        Ok(())
    }

    fn shift(&mut self, _dir: ShiftDir, scope: ShiftScope) -> Result<()> {
        self.counts.record_shift(scope);
        Ok(())
    }

    fn writeback(&mut self, _row: usize) -> Result<()> {
        self.counts.writeback += 1;
        Ok(())
    }

    fn zero_test(&mut self) -> Result<bool> {
        self.counts.zero_test += 1;
        Ok(false)
    }
}

/// A compiled, replayable sequence of micro-ops.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandStream {
    pub ops: Vec<MicroOp>,
    /// `(index of the next op, mark)` pairs.
    pub marks: Vec<(usize, Mark)>,
    /// Twiddle/multiplier value folded into the stream, if any.
    pub constant: Option<u64>,
    pub width: u32,
}

impl CommandStream {
    pub fn new(width: u32, constant: Option<u64>) -> Self {
        Self { ops: Vec::new(), marks: Vec::new(), constant, width }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn counts(&self) -> OpCounts {
        let mut counts = OpCounts::default();
        for op in &self.ops {
            counts.record(op);
        }
        counts
    }

    pub fn replay_on<B: Backend + ?Sized>(&self, target: &mut B) -> Result<()> {
        for op in &self.ops {
            target.emit(op)?;
        }
        Ok(())
    }

    /// Op index at which `mark` was placed.
    pub fn mark_index(&self, mark: Mark) -> Option<usize> {
        self.marks.iter().find(|(_, m)| *m == mark).map(|(i, _)| *i)
    }
}

impl Backend for CommandStream {
    fn write_row(&mut self, row: usize, bits: &BitRow) -> Result<()> {
        self.ops.push(MicroOp::WriteRow { row, bits: bits.clone() });
        Ok(())
    }

    fn activate(&mut self, a: usize, b: usize, mode: Logic) -> Result<()> {
        if a == b {
            return Err(Error::SameRowActivation(a));
        }
        self.ops.push(MicroOp::Activate { a, b, mode });
        Ok(())
    }

    fn shift(&mut self, dir: ShiftDir, scope: ShiftScope) -> Result<()> {
        self.ops.push(MicroOp::Shift { dir, scope });
        Ok(())
    }

    fn writeback(&mut self, row: usize) -> Result<()> {
        self.ops.push(MicroOp::Writeback { row });
        Ok(())
    }

    fn zero_test(&mut self) -> Result<bool> {
        Err(Error::Unsupported("zero test needs live array data; compile in deterministic-latency mode"))
    }

    fn mark(&mut self, mark: Mark) {
        self.marks.push((self.ops.len(), mark));
    }
}
