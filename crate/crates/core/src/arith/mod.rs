//! Bit-parallel modular arithmetic built from array micro-ops.

mod kernel;
mod montgomery;
mod rows;

pub use kernel::{ArithConfig, Kernel, Latency, ModmulShift};
pub use montgomery::{mod_inverse, mulmod, powmod, MontgomeryContext};
pub use rows::{ConstRows, ModMulRowMap};

use crate::bitcell::{Backend, BitRow, CommandStream, Subarray};
use crate::error::Result;

/// Compiles the op stream for multiplying by the constant `a`.
///
/// The result depends only on `a`, the word width and the row map, so one
/// stream serves every tile (and every modulus) that shares the twiddle.
pub fn compile_twiddle_commands(a: u64, ctx: &MontgomeryContext, rows: &ModMulRowMap) -> Result<CommandStream> {
    compile_twiddle_commands_with(a, ctx, rows, ArithConfig::default())
}

pub fn compile_twiddle_commands_with(
    a: u64,
    ctx: &MontgomeryContext,
    rows: &ModMulRowMap,
    config: ArithConfig,
) -> Result<CommandStream> {
    ctx.check_operand(a)?;
    let kernel = Kernel::new(ctx.bits() as usize, rows.consts, config)?;
    let mut stream = CommandStream::new(ctx.bits(), Some(a));
    kernel.modmul_const(&mut stream, a, rows)?;
    Ok(stream)
}

/// Runs a compiled stream; returns the carry-save pair `(Sum, Carry)`.
pub fn bp_modmul(arr: &mut Subarray, stream: &CommandStream, rows: &ModMulRowMap) -> Result<(BitRow, BitRow)> {
    rows.validate(arr.rows())?;
    stream.replay_on(arr)?;
    Ok((arr.peek_row(rows.sum)?, arr.peek_row(rows.carry)?))
}

/// Collapses `Sum + 2*Carry` into a single value in `[0, M)`, left in `Sum`.
pub fn resolve_carry_save<B: Backend + ?Sized>(be: &mut B, kernel: &Kernel, rows: &ModMulRowMap) -> Result<usize> {
    kernel.resolve(be, rows)
}

/// A small self-contained array for exercising the arithmetic in isolation:
/// one value per tile, fixed row roles, constants installed.
#[derive(Debug)]
pub struct Bench {
    pub array: Subarray,
    pub kernel: Kernel,
    pub rows: ModMulRowMap,
    pub tiles: usize,
}

impl Bench {
    /// Multiplier row for row-by-row products.
    pub const A: usize = 0;
    pub const B: usize = 1;
    /// Second operand for add/sub.
    pub const T: usize = 8;
    pub const DST: usize = 9;
    const CONST_BASE: usize = 10;
    pub const ROWS: usize = 14;

    pub fn new(width: usize, moduli: &[u64], config: ArithConfig) -> Result<Self> {
        let tiles = moduli.len();
        let cols = (tiles * width).max(4);
        let mut array = Subarray::untraced(Self::ROWS, cols)?;
        let consts = ConstRows::at(Self::CONST_BASE);
        consts.install(&mut array, cols, width, moduli)?;
        let rows = ModMulRowMap::new(Self::B, [2, 3, 4, 5, 6, 7], consts);
        let kernel = Kernel::new(width, consts, config)?;
        Ok(Self { array, kernel, rows, tiles })
    }

    pub fn put(&mut self, row: usize, values: &[u64]) -> Result<()> {
        let bits = BitRow::from_tiles(self.array.cols(), self.kernel.width, values);
        self.array.write_row(row, &bits)
    }

    pub fn get(&self, row: usize) -> Result<Vec<u64>> {
        let bits = self.array.peek_row(row)?;
        Ok((0..self.tiles).map(|t| bits.tile_value(self.kernel.width, t)).collect())
    }

    /// Tile-wise `a * B * R^-1 mod M` for a shared constant `a`.
    pub fn modmul_const(&mut self, a: u64, b: &[u64]) -> Result<Vec<u64>> {
        self.put(Self::B, b)?;
        self.kernel.modmul_const(&mut self.array, a, &self.rows)?;
        self.kernel.resolve(&mut self.array, &self.rows)?;
        self.get(self.rows.sum)
    }

    /// Tile-wise `a_i * b_i * R^-1 mod M_i`.
    pub fn modmul_rows(&mut self, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
        self.put(Self::A, a)?;
        self.put(Self::B, b)?;
        self.kernel.modmul_rows(&mut self.array, Self::A, &self.rows)?;
        self.kernel.resolve(&mut self.array, &self.rows)?;
        self.get(self.rows.sum)
    }

    fn scratch(&self) -> [usize; 4] {
        let r = &self.rows;
        [r.sum, r.carry, r.c1, r.s1]
    }

    pub fn add(&mut self, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
        self.put(Self::B, u)?;
        self.put(Self::T, t)?;
        let r = self.rows;
        self.kernel.add(&mut self.array, Self::B, Self::T, Self::DST, r.c1, r.s1)?;
        self.get(Self::DST)
    }

    pub fn modadd(&mut self, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
        self.put(Self::B, u)?;
        self.put(Self::T, t)?;
        let s = self.scratch();
        self.kernel.modadd(&mut self.array, Self::B, Self::T, Self::DST, s)?;
        self.get(Self::DST)
    }

    pub fn modsub(&mut self, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
        self.put(Self::B, u)?;
        self.put(Self::T, t)?;
        let s = self.scratch();
        self.kernel.modsub(&mut self.array, Self::B, Self::T, Self::DST, s)?;
        self.get(Self::DST)
    }
}

/// Element-wise `(u + t) mod 2^w` on a one-tile-per-value bench.
pub fn bp_add(width: usize, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
    let moduli = vec![1; u.len()];
    Bench::new(width, &moduli, ArithConfig::default())?.add(u, t)
}

/// Element-wise `(u + t) mod M`; needs `M < 2^(w-1)`.
pub fn bp_modadd(ctx: &MontgomeryContext, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
    ctx.check_headroom()?;
    let moduli = vec![ctx.modulus(); u.len()];
    Bench::new(ctx.bits() as usize, &moduli, ArithConfig::default())?.modadd(u, t)
}

/// Element-wise `(u - t) mod M`; needs `M < 2^(w-1)`.
pub fn bp_modsub(ctx: &MontgomeryContext, u: &[u64], t: &[u64]) -> Result<Vec<u64>> {
    ctx.check_headroom()?;
    let moduli = vec![ctx.modulus(); u.len()];
    Bench::new(ctx.bits() as usize, &moduli, ArithConfig::default())?.modsub(u, t)
}

/// Row contents of one tile right after a marked step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StepState {
    pub mark: crate::bitcell::Mark,
    pub sum: u64,
    pub carry: u64,
    pub c1: u64,
    pub s1: u64,
    pub c2: u64,
    pub m: u64,
}

/// Runs one single-tile product `a·b·R^-1 mod m` and records the scratch
/// rows after every step of every iteration. Returns the states and the
/// resolved result.
pub fn trace_modmul_steps(a: u64, b: u64, m: u64, width: u32) -> Result<(Vec<StepState>, u64)> {
    let ctx = MontgomeryContext::new(m, width)?;
    ctx.check_operand(b)?;
    let mut bench = Bench::new(width as usize, &[m], ArithConfig::default())?;
    bench.put(Bench::B, &[b])?;
    let stream = compile_twiddle_commands(a, &ctx, &bench.rows)?;
    let w = width as usize;
    let r = bench.rows;
    let mut states = Vec::with_capacity(stream.marks.len());
    let mut next = 0;
    for &(at, mark) in &stream.marks {
        for op in &stream.ops[next..at] {
            bench.array.execute(op)?;
        }
        next = at;
        let val = |row: usize| bench.array.peek_row(row).map(|bits| bits.tile_value(w, 0));
        states.push(StepState { mark, sum: val(r.sum)?, carry: val(r.carry)?, c1: val(r.c1)?, s1: val(r.s1)?, c2: val(r.c2)?, m: val(r.m)? });
    }
    for op in &stream.ops[next..] {
        bench.array.execute(op)?;
    }
    bench.kernel.resolve(&mut bench.array, &r)?;
    Ok((states, bench.get(r.sum)?[0]))
}
