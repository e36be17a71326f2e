use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::row::BitRow;
use crate::error::{Error, Result};

/// Sense-amplifier logic applied to two simultaneously activated rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Logic {
    And,
    Nor,
    Or,
    Xor,
}

impl Logic {
    pub const ALL: [Logic; 4] = [Logic::And, Logic::Nor, Logic::Or, Logic::Xor];

    #[inline]
    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            Logic::And => a & b,
            Logic::Nor => !(a | b),
            Logic::Or => a | b,
            Logic::Xor => a ^ b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Logic::And => "AND",
            Logic::Nor => "NOR",
            Logic::Or => "OR",
            Logic::Xor => "XOR",
        }
    }
}

impl FromStr for Logic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "AND" => Ok(Logic::And),
            "NOR" => Ok(Logic::Nor),
            "OR" => Ok(Logic::Or),
            "XOR" => Ok(Logic::Xor),
            other => Err(format!("unknown logic mode {other}")),
        }
    }
}

/// Latch shift direction. `Left` moves bits toward higher columns (MSB).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftDir {
    Left,
    Right,
}

/// Which boundaries a 1-bit latch shift respects.
///
/// `Global` and `Align` both move the whole latch with zero fill only at the
/// array edges; `Align` marks shifts whose purpose is moving a word between
/// tiles, so statistics can count word-alignment traffic separately.
/// `Tile` zero-fills at every tile boundary (tiles start at `origin + k*width`;
/// columns below `origin` form one partial tile).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftScope {
    Global,
    Tile { width: usize, origin: usize },
    Align,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    WriteRow,
    Activate2,
    Shift,
    Writeback,
    ZeroTest,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::WriteRow => "WRITE_ROW",
            OpKind::Activate2 => "ACTIVATE2",
            OpKind::Shift => "SHIFT",
            OpKind::Writeback => "WRITEBACK",
            OpKind::ZeroTest => "ZERO_TEST",
        }
    }
}

/// One array micro-op. These six forms are the only way array state changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MicroOp {
    WriteRow { row: usize, bits: BitRow },
    Activate { a: usize, b: usize, mode: Logic },
    Shift { dir: ShiftDir, scope: ShiftScope },
    Writeback { row: usize },
    /// Wired-OR test of the latch; `result` is the observed outcome.
    ZeroTest { result: bool },
}

impl MicroOp {
    pub fn kind(&self) -> OpKind {
        match self {
            MicroOp::WriteRow { .. } => OpKind::WriteRow,
            MicroOp::Activate { .. } => OpKind::Activate2,
            MicroOp::Shift { .. } => OpKind::Shift,
            MicroOp::Writeback { .. } => OpKind::Writeback,
            MicroOp::ZeroTest { .. } => OpKind::ZeroTest,
        }
    }

    /// Formats the op as one trace line without the sequence number.
    pub fn to_line(&self) -> String {
        self.to_string()
    }

    /// Parses `<seq> <KIND> <args...>`; `cols` is needed to size WRITE_ROW payloads.
    pub fn parse_line(line: &str, cols: usize, lineno: usize) -> Result<(usize, MicroOp)> {
        let err = |msg: String| Error::TraceParse { line: lineno, msg };
        let mut parts = line.split_whitespace();
        let seq = parts
            .next()
            .ok_or_else(|| err("empty line".into()))?
            .parse::<usize>()
            .map_err(|e| err(format!("bad sequence number: {e}")))?;
        let kind = parts.next().ok_or_else(|| err("missing op kind".into()))?;
        let args: Vec<&str> = parts.collect();
        let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("bad number {s:?}: {e}")));
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(format!("{kind} expects {n} arguments, got {}", args.len())))
            }
        };
        let op = match kind {
            "WRITE_ROW" => {
                want(2)?;
                let bits = BitRow::from_hex(cols, args[1]).map_err(|e| err(e.to_string()))?;
                MicroOp::WriteRow { row: num(args[0])?, bits }
            }
            "ACTIVATE2" => {
                want(3)?;
                MicroOp::Activate { a: num(args[0])?, b: num(args[1])?, mode: args[2].parse().map_err(err)? }
            }
            "SHIFT" => {
                if args.len() < 2 {
                    return Err(err("SHIFT expects a direction and a scope".into()));
                }
                let dir = match args[0] {
                    "LEFT" => ShiftDir::Left,
                    "RIGHT" => ShiftDir::Right,
                    d => return Err(err(format!("bad shift direction {d}"))),
                };
                let scope = match args[1] {
                    "GLOBAL" if args.len() == 2 => ShiftScope::Global,
                    "ALIGN" if args.len() == 2 => ShiftScope::Align,
                    "TILE" if args.len() == 4 => ShiftScope::Tile { width: num(args[2])?, origin: num(args[3])? },
                    s => return Err(err(format!("bad shift scope {s} ({} args)", args.len()))),
                };
                MicroOp::Shift { dir, scope }
            }
            "WRITEBACK" => {
                want(1)?;
                MicroOp::Writeback { row: num(args[0])? }
            }
            "ZERO_TEST" => {
                want(1)?;
                let result = match args[0] {
                    "0" => false,
                    "1" => true,
                    r => return Err(err(format!("bad zero-test result {r}"))),
                };
                MicroOp::ZeroTest { result }
            }
            other => return Err(err(format!("unknown micro-op kind {other}"))),
        };
        Ok((seq, op))
    }
}

impl fmt::Display for MicroOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MicroOp::WriteRow { row, bits } => write!(f, "WRITE_ROW {row} {}", bits.to_hex()),
            MicroOp::Activate { a, b, mode } => write!(f, "ACTIVATE2 {a} {b} {}", mode.name()),
            MicroOp::Shift { dir, scope } => {
                let d = match dir {
                    ShiftDir::Left => "LEFT",
                    ShiftDir::Right => "RIGHT",
                };
                match scope {
                    ShiftScope::Global => write!(f, "SHIFT {d} GLOBAL"),
                    ShiftScope::Align => write!(f, "SHIFT {d} ALIGN"),
                    ShiftScope::Tile { width, origin } => write!(f, "SHIFT {d} TILE {width} {origin}"),
                }
            }
            MicroOp::Writeback { row } => write!(f, "WRITEBACK {row}"),
            MicroOp::ZeroTest { result } => write!(f, "ZERO_TEST {}", u8::from(*result)),
        }
    }
}
