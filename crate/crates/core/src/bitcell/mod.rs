//! The SRAM subarray model: bit grid, sense-amplifier latch, and the six
//! micro-ops that are the only way to compute on it.

mod backend;
mod op;
pub mod replay;
mod row;
mod state;
mod subarray;

pub use backend::{Backend, CommandStream, Mark, OpCounter, OpCounts};
pub use op::{Logic, MicroOp, OpKind, ShiftDir, ShiftScope};
pub use replay::{replay, LogicInterpreter, TraceFile};
pub use row::BitRow;
pub use state::ArrayState;
pub use subarray::{ShiftAudit, Subarray, DEFAULT_COLS, DEFAULT_ROWS};
