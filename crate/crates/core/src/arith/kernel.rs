use serde::{Deserialize, Serialize};

use super::rows::{ConstRows, ModMulRowMap};
use crate::bitcell::{Backend, Logic, Mark, ShiftDir, ShiftScope};
use crate::error::{Error, Result};

/// Carry-propagation latency policy for in-array addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Latency {
    /// Always `w` XOR passes and `w - 1` carry passes: reproducible cycle counts.
    #[default]
    Deterministic,
    /// Stop as soon as a zero test sees no carries left in any tile.
    DataDependent,
}

/// Scope used for the two 1-bit shifts inside the multiplication loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModmulShift {
    /// Unmasked shifts; safe because the crossing bits are always 0.
    #[default]
    Global,
    /// Masked at tile boundaries (one extra cycle each in the cost model).
    Tile,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithConfig {
    pub latency: Latency,
    pub modmul_shift: ModmulShift,
}

/// Emits in-array arithmetic for tiles of `width` columns starting at column 0.
///
/// Every routine works on all tiles at once; values are `width`-bit words
/// stored LSB at the tile's lowest column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub width: usize,
    pub consts: ConstRows,
    pub config: ArithConfig,
}

impl Kernel {
    pub fn new(width: usize, consts: ConstRows, config: ArithConfig) -> Result<Self> {
        if !(2..=64).contains(&width) {
            return Err(Error::InvalidModulus(format!("tile width {width} outside 2..=64")));
        }
        Ok(Self { width, consts, config })
    }

    pub fn tile_scope(&self) -> ShiftScope {
        ShiftScope::Tile { width: self.width, origin: 0 }
    }

    fn modmul_scope(&self) -> ShiftScope {
        match self.config.modmul_shift {
            ModmulShift::Global => ShiftScope::Global,
            ModmulShift::Tile => self.tile_scope(),
        }
    }

    /// Latch := row.
    pub fn load<B: Backend + ?Sized>(&self, be: &mut B, src: usize) -> Result<()> {
        be.activate(src, self.consts.zero, Logic::Or)
    }

    pub fn copy<B: Backend + ?Sized>(&self, be: &mut B, src: usize, dst: usize) -> Result<()> {
        self.load(be, src)?;
        be.writeback(dst)
    }

    pub fn not<B: Backend + ?Sized>(&self, be: &mut B, src: usize, dst: usize) -> Result<()> {
        be.activate(src, self.consts.zero, Logic::Nor)?;
        be.writeback(dst)
    }

    pub fn zero_rows<B: Backend + ?Sized>(&self, be: &mut B, rows: &[usize]) -> Result<()> {
        be.activate(self.consts.zero, self.consts.one, Logic::And)?;
        rows.iter().try_for_each(|&r| be.writeback(r))
    }

    fn op2<B: Backend + ?Sized>(&self, be: &mut B, a: usize, b: usize, mode: Logic, dst: usize) -> Result<()> {
        be.activate(a, b, mode)?;
        be.writeback(dst)
    }

    /// Broadcasts one seed bit per tile across the whole tile.
    ///
    /// On entry the latch holds the seed (tile LSB for `Left`, tile MSB for
    /// `Right`); on exit `dst` and the latch hold all-ones in seeded tiles.
    /// Doubling steps cover exactly `width` bits, so no shift runs past the
    /// tile edge: `ceil(log2 w)` steps and `w - 1` tile-scoped shifts in total.
    pub fn smear<B: Backend + ?Sized>(&self, be: &mut B, dir: ShiftDir, dst: usize, tmp: usize) -> Result<()> {
        be.writeback(dst)?;
        let mut covered = 1;
        while covered < self.width {
            let step = covered.min(self.width - covered);
            for _ in 0..step {
                be.shift(dir, self.tile_scope())?;
            }
            be.writeback(tmp)?;
            be.activate(tmp, dst, Logic::Or)?;
            be.writeback(dst)?;
            covered += step;
        }
        Ok(())
    }

    /// `dst := (x + y) mod 2^w` by iterated XOR / AND-shift carry passes.
    ///
    /// `x` and `y` are only read; `dst` may alias `x` or `y`. `t0`, `t1` hold
    /// carries and must differ from every other operand.
    pub fn add<B: Backend + ?Sized>(
        &self,
        be: &mut B,
        x: usize,
        y: usize,
        dst: usize,
        t0: usize,
        t1: usize,
    ) -> Result<()> {
        let (mut x, mut y) = (x, y);
        let carry_rows = [t0, t1];
        for k in 0..self.width {
            let last = k + 1 == self.width;
            let mut done = last;
            if !last {
                be.activate(x, y, Logic::And)?;
                be.shift(ShiftDir::Left, self.tile_scope())?;
                if self.config.latency == Latency::DataDependent && be.zero_test()? {
                    done = true;
                } else {
                    be.writeback(carry_rows[k % 2])?;
                }
            }
            self.op2(be, x, y, Logic::Xor, dst)?;
            if done {
                break;
            }
            x = dst;
            y = carry_rows[k % 2];
        }
        Ok(())
    }

    /// `dst := (u + t) mod M`, for `u, t < M < 2^(w-1)`. `scratch` must not
    /// overlap the operands; `dst` may alias `u` or `t`.
    pub fn modadd<B: Backend + ?Sized>(&self, be: &mut B, u: usize, t: usize, dst: usize, scratch: [usize; 4]) -> Result<()> {
        let [s, r, a, b] = scratch;
        let c = &self.consts;
        self.add(be, u, t, s, r, a)?;
        self.not(be, s, r)?;
        self.add(be, r, c.modulus, r, a, b)?; // r = !s + M = !(s - M)
        self.not(be, r, a)?; // a = s - M
        be.activate(a, c.top, Logic::And)?;
        self.smear(be, ShiftDir::Right, a, b)?; // a = all ones where s < M
        self.op2(be, s, a, Logic::And, b)?;
        self.op2(be, r, a, Logic::Nor, a)?; // (s - M) where s >= M
        self.op2(be, b, a, Logic::Or, dst)
    }

    /// `dst := (u - t) mod M`, for `u, t < M < 2^(w-1)`. Same aliasing rules
    /// as [`Kernel::modadd`].
    pub fn modsub<B: Backend + ?Sized>(&self, be: &mut B, u: usize, t: usize, dst: usize, scratch: [usize; 4]) -> Result<()> {
        let [d, mask, a, b] = scratch;
        let c = &self.consts;
        self.not(be, u, d)?;
        self.add(be, d, t, d, a, b)?; // !u + t = !(u - t)
        self.not(be, d, d)?;
        be.activate(d, c.top, Logic::And)?;
        self.smear(be, ShiftDir::Right, mask, a)?;
        self.op2(be, mask, c.modulus, Logic::And, mask)?;
        self.add(be, d, mask, dst, a, b)
    }

    /// `m := M` in tiles whose `Sum` LSB is 1, else 0.
    pub fn select_m<B: Backend + ?Sized>(&self, be: &mut B, rows: &ModMulRowMap) -> Result<()> {
        be.activate(rows.sum, rows.consts.one, Logic::And)?;
        self.smear(be, ShiftDir::Left, rows.m, rows.c2)?;
        self.op2(be, rows.m, rows.consts.modulus, Logic::And, rows.m)
    }

    /// `Sum, Carry += addend` in carry-save form, with `Carry << 1` first.
    fn accumulate_addend<B: Backend + ?Sized>(&self, be: &mut B, rows: &ModMulRowMap, addend: usize, iteration: usize) -> Result<()> {
        self.op2(be, rows.sum, addend, Logic::And, rows.c1)?;
        self.op2(be, rows.sum, addend, Logic::Xor, rows.s1)?;
        self.load(be, rows.carry)?;
        be.shift(ShiftDir::Left, self.modmul_scope())?;
        be.writeback(rows.carry)?;
        be.mark(Mark { iteration, step: 1 });
        self.op2(be, rows.carry, rows.s1, Logic::And, rows.c2)?;
        self.op2(be, rows.carry, rows.s1, Logic::Xor, rows.sum)?;
        be.mark(Mark { iteration, step: 2 });
        self.op2(be, rows.c1, rows.c2, Logic::Or, rows.carry)?;
        be.mark(Mark { iteration, step: 3 });
        Ok(())
    }

    /// `P := (P + m) / 2` in carry-save form.
    fn reduce_and_halve<B: Backend + ?Sized>(&self, be: &mut B, rows: &ModMulRowMap, iteration: usize) -> Result<()> {
        self.select_m(be, rows)?;
        self.op2(be, rows.sum, rows.m, Logic::And, rows.c1)?;
        be.activate(rows.sum, rows.m, Logic::Xor)?;
        be.shift(ShiftDir::Right, self.modmul_scope())?;
        be.writeback(rows.s1)?;
        be.mark(Mark { iteration, step: 4 });
        self.op2(be, rows.s1, rows.c1, Logic::And, rows.c2)?;
        self.op2(be, rows.s1, rows.c1, Logic::Xor, rows.s1)?; // s2
        be.mark(Mark { iteration, step: 5 });
        self.op2(be, rows.carry, rows.s1, Logic::And, rows.c1)?; // c3
        self.op2(be, rows.carry, rows.s1, Logic::Xor, rows.sum)?;
        be.mark(Mark { iteration, step: 6 });
        self.op2(be, rows.c2, rows.c1, Logic::Or, rows.carry)?;
        be.mark(Mark { iteration, step: 7 });
        Ok(())
    }

    /// Carry-save Montgomery product with the multiplier `a` folded into the
    /// op sequence: the add-`B` block is emitted only for set bits of `a`.
    /// Leaves `Sum + 2*Carry ≡ a*B*R^-1 (mod M)` in the `sum`/`carry` rows.
    pub fn modmul_const<B: Backend + ?Sized>(&self, be: &mut B, a: u64, rows: &ModMulRowMap) -> Result<()> {
        if self.width < 64 && a >> self.width != 0 {
            return Err(Error::OperandOutOfRange { value: a as u128, bits: self.width as u32 });
        }
        self.zero_rows(be, &[rows.sum, rows.carry])?;
        for i in 0..self.width {
            if (a >> i) & 1 == 1 {
                self.accumulate_addend(be, rows, rows.b, i)?;
            }
            self.reduce_and_halve(be, rows, i)?;
        }
        Ok(())
    }

    /// Montgomery product where the multiplier lives in row `a` (one value per
    /// tile). Each bit is tested by predication: the tile's current LSB of
    /// `a` is smeared into a mask that gates `B`. Row `a` is consumed.
    pub fn modmul_rows<B: Backend + ?Sized>(&self, be: &mut B, a: usize, rows: &ModMulRowMap) -> Result<()> {
        self.zero_rows(be, &[rows.sum, rows.carry])?;
        for i in 0..self.width {
            be.activate(a, rows.consts.one, Logic::And)?;
            self.smear(be, ShiftDir::Left, rows.m, rows.c2)?;
            self.op2(be, rows.m, rows.b, Logic::And, rows.m)?;
            self.accumulate_addend(be, rows, rows.m, i)?;
            if i + 1 < self.width {
                self.load(be, a)?;
                be.shift(ShiftDir::Right, self.tile_scope())?;
                be.writeback(a)?;
            }
            self.reduce_and_halve(be, rows, i)?;
        }
        Ok(())
    }

    /// `sum := (Sum + 2*Carry) mod 2^w`, then one conditional `-M`.
    ///
    /// Lands in `[0, M)` whenever `Sum + 2*Carry < min(2M, 2^w)`, which holds
    /// for Montgomery products with `B < M < 2^(w-1)`.
    pub fn resolve<B: Backend + ?Sized>(&self, be: &mut B, rows: &ModMulRowMap) -> Result<usize> {
        let c = &rows.consts;
        self.load(be, rows.carry)?;
        be.shift(ShiftDir::Left, self.tile_scope())?;
        be.writeback(rows.carry)?;
        self.add(be, rows.sum, rows.carry, rows.sum, rows.c1, rows.s1)?;
        self.not(be, rows.sum, rows.carry)?;
        self.add(be, rows.carry, c.modulus, rows.carry, rows.c1, rows.s1)?; // !(P - M)
        self.not(be, rows.carry, rows.c1)?;
        be.activate(rows.c1, c.top, Logic::And)?;
        self.smear(be, ShiftDir::Right, rows.c1, rows.s1)?; // ones where P < M
        self.op2(be, rows.sum, rows.c1, Logic::And, rows.s1)?;
        self.op2(be, rows.carry, rows.c1, Logic::Nor, rows.c2)?;
        self.op2(be, rows.s1, rows.c2, Logic::Or, rows.sum)?;
        Ok(rows.sum)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Bench, MontgomeryContext};
    use super::*;
    use crate::arith::mulmod;

    fn mont(a: u64, b: u64, ctx: &MontgomeryContext) -> u64 {
        mulmod(mulmod(a, b, ctx.modulus()), ctx.r_inv(), ctx.modulus())
    }

    #[test]
    fn worked_example() {
        let mut bench = Bench::new(3, &[7], ArithConfig::default()).unwrap();
        assert_eq!(bench.modmul_const(4, &[3]).unwrap(), vec![5]);
    }

    #[test]
    fn smear_uses_w_minus_1_shifts() {
        for w in 2..=64 {
            let k = Kernel::new(w, ConstRows::at(0), ArithConfig::default()).unwrap();
            let mut c = crate::bitcell::OpCounter::new();
            k.smear(&mut c, ShiftDir::Left, 5, 6).unwrap();
            assert_eq!(c.counts.shift_tile, w as u64 - 1, "w={w}");
        }
    }

    #[test]
    fn small_widths_valid_domain() {
        for n in 3..=7usize {
            let moduli: Vec<u64> = (3..1u64 << (n - 1)).step_by(2).collect();
            for a in 0..1u64 << n {
                let mut pairs = Vec::new();
                for &m in &moduli {
                    for b in 0..m {
                        pairs.push((m, b));
                    }
                }
                let ms: Vec<u64> = pairs.iter().map(|p| p.0).collect();
                let bs: Vec<u64> = pairs.iter().map(|p| p.1).collect();
                let mut bench = Bench::new(n, &ms, ArithConfig::default()).unwrap();
                let got = bench.modmul_const(a, &bs).unwrap();
                for (i, &(m, b)) in pairs.iter().enumerate() {
                    let ctx = MontgomeryContext::new(m, n as u32).unwrap();
                    assert_eq!(got[i], mont(a, b, &ctx), "n={n} M={m} A={a} B={b}");
                }
            }
        }
    }

    #[test]
    fn row_multiplier_matches_constant() {
        let ctx = MontgomeryContext::new(7681, 16).unwrap();
        let a: Vec<u64> = (0..40).map(|i| (i * 977 + 13) % 65536).collect();
        let b: Vec<u64> = (0..40).map(|i| (i * 1231 + 7) % 7681).collect();
        let mut bench = Bench::new(16, &[7681; 40], ArithConfig::default()).unwrap();
        let got = bench.modmul_rows(&a, &b).unwrap();
        for i in 0..40 {
            assert_eq!(got[i], mont(a[i], b[i], &ctx));
        }
    }

    #[test]
    fn add_sub_and_latency_modes() {
        let q = 7681u64;
        let u: Vec<u64> = (0..50).map(|i| (i * 3539 + 11) % q).collect();
        let t: Vec<u64> = (0..50).map(|i| (i * 6007 + 5000) % q).collect();
        for latency in [Latency::Deterministic, Latency::DataDependent] {
            let cfg = ArithConfig { latency, ..Default::default() };
            let mut bench = Bench::new(14, &[q; 50], cfg).unwrap();
            let sum = bench.modadd(&u, &t).unwrap();
            let diff = bench.modsub(&u, &t).unwrap();
            let raw = bench.add(&u, &t).unwrap();
            for i in 0..50 {
                assert_eq!(sum[i], (u[i] + t[i]) % q);
                assert_eq!(diff[i], (u[i] + q - t[i]) % q);
                assert_eq!(raw[i], (u[i] + t[i]) & 0x3fff);
            }
        }
    }

    #[test]
    fn tile_scoped_modmul_agrees() {
        let cfg = ArithConfig { modmul_shift: ModmulShift::Tile, ..Default::default() };
        let ctx = MontgomeryContext::new(12289, 16).unwrap();
        let b: Vec<u64> = (0..20).map(|i| i * 600).collect();
        let mut bench = Bench::new(16, &[12289; 20], cfg).unwrap();
        let got = bench.modmul_const(4321, &b).unwrap();
        for i in 0..20 {
            assert_eq!(got[i], mont(4321, b[i], &ctx));
        }
    }
}
