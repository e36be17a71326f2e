//! Reference interpreter for micro-op traces.
//!
//! Deliberately naive: one `bool` per cell, no word packing and no shared code
//! with [`Subarray`](super::Subarray), so agreement between the two is a real
//! check that results come only from the six micro-ops.

use std::fmt::Write as _;
use std::path::Path;

use super::op::{Logic, MicroOp, ShiftDir, ShiftScope};
use super::row::BitRow;
use super::state::ArrayState;
use crate::error::{Error, Result};

pub struct LogicInterpreter {
    cols: usize,
    cells: Vec<Vec<bool>>,
    latch: Vec<bool>,
    executed: usize,
}

impl LogicInterpreter {
    pub fn new(initial: &ArrayState) -> Self {
        Self {
            cols: initial.cols(),
            cells: initial.cells().iter().map(BitRow::to_bits).collect(),
            latch: initial.latch().to_bits(),
            executed: 0,
        }
    }

    fn row(&self, r: usize) -> Result<&Vec<bool>> {
        self.cells.get(r).ok_or(Error::RowOutOfRange { addr: r, rows: self.cells.len() })
    }

    pub fn step(&mut self, op: &MicroOp) -> Result<()> {
        let seq = self.executed;
        match op {
            MicroOp::WriteRow { row, bits } => {
                self.row(*row)?;
                if bits.cols() != self.cols {
                    return Err(Error::WidthMismatch { expected: self.cols, got: bits.cols() });
                }
                self.cells[*row] = bits.to_bits();
            }
            MicroOp::Activate { a, b, mode } => {
                if a == b {
                    return Err(Error::SameRowActivation(*a));
                }
                let (ra, rb) = (self.row(*a)?.clone(), self.row(*b)?);
                self.latch = ra
                    .iter()
                    .zip(rb)
                    .map(|(&x, &y)| match mode {
                        Logic::And => x && y,
                        Logic::Or => x || y,
                        Logic::Nor => !(x || y),
                        Logic::Xor => x != y,
                    })
                    .collect();
            }
            MicroOp::Shift { dir, scope } => {
                let n = self.cols;
                let boundary = |c: usize| -> bool {
                    match scope {
                        ShiftScope::Tile { width, origin } => c == 0 || (c >= *origin && (c - origin) % width == 0),
                        _ => c == 0,
                    }
                };
                let old = self.latch.clone();
                for c in 0..n {
                    self.latch[c] = match dir {
                        // column c receives from c-1 unless c starts a tile
                        ShiftDir::Left => c > 0 && !boundary(c) && old[c - 1],
                        // column c receives from c+1 unless c+1 starts a tile
                        ShiftDir::Right => c + 1 < n && !boundary(c + 1) && old[c + 1],
                    };
                }
            }
            MicroOp::Writeback { row } => {
                self.row(*row)?;
                self.cells[*row] = self.latch.clone();
            }
            MicroOp::ZeroTest { result } => {
                let seen = self.latch.iter().all(|b| !b);
                if seen != *result {
                    return Err(Error::ReplayDiverged { seq, msg: format!("zero test recorded {result}, observed {seen}") });
                }
            }
        }
        self.executed += 1;
        Ok(())
    }

    pub fn run(&mut self, ops: &[MicroOp]) -> Result<()> {
        ops.iter().try_for_each(|op| self.step(op))
    }

    pub fn state(&self) -> ArrayState {
        ArrayState::new(
            self.cells.len(),
            self.cols,
            self.cells.iter().map(|r| BitRow::from_bits(r)).collect(),
            BitRow::from_bits(&self.latch),
        )
    }
}

/// Replays `ops` from `initial` on the reference interpreter.
pub fn replay(initial: &ArrayState, ops: &[MicroOp]) -> Result<ArrayState> {
    let mut interp = LogicInterpreter::new(initial);
    interp.run(ops)?;
    Ok(interp.state())
}

/// A trace file: dimensions, ops, and the digest of the state it ended in.
///
/// ```text
/// # insram-ntt trace v1
/// # dims <rows> <cols>
/// <seq> <KIND> <args...>
/// ...
/// # final-sha256 <hex>
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFile {
    pub rows: usize,
    pub cols: usize,
    pub ops: Vec<MicroOp>,
    pub final_digest: Option<String>,
}

impl TraceFile {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.ops.len() * 20);
        let _ = writeln!(out, "# insram-ntt trace v1\n# dims {} {}", self.rows, self.cols);
        for (seq, op) in self.ops.iter().enumerate() {
            let _ = writeln!(out, "{seq} {op}");
        }
        if let Some(d) = &self.final_digest {
            let _ = writeln!(out, "# final-sha256 {d}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut dims = None;
        let mut ops = Vec::new();
        let mut final_digest = None;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let parts: Vec<&str> = comment.split_whitespace().collect();
                match parts.as_slice() {
                    ["dims", r, c] => {
                        let parse = |s: &str| {
                            s.parse::<usize>().map_err(|e| Error::TraceParse { line: lineno, msg: e.to_string() })
                        };
                        dims = Some((parse(r)?, parse(c)?));
                    }
                    ["final-sha256", d] => final_digest = Some(d.to_string()),
                    _ => {}
                }
                continue;
            }
            let (_, cols) = dims.ok_or(Error::TraceParse { line: lineno, msg: "op before dims header".into() })?;
            let (seq, op) = MicroOp::parse_line(line, cols, lineno)?;
            if seq != ops.len() {
                return Err(Error::TraceParse { line: lineno, msg: format!("expected sequence {}, got {seq}", ops.len()) });
            }
            ops.push(op);
        }
        let (rows, cols) = dims.ok_or(Error::TraceParse { line: 0, msg: "missing dims header".into() })?;
        Ok(Self { rows, cols, ops, final_digest })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::parse(&text)
    }
}
