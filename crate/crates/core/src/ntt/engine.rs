use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::layout::{layout_plan_with, ArrayDims, TileLayout};
use super::twiddle::{precompute_twiddles, TwiddleTable};
use crate::arith::{ArithConfig, Kernel, MontgomeryContext};
use crate::bitcell::{Backend, BitRow, Logic, ShiftDir, ShiftScope, Subarray};
use crate::error::{Error, Result};
use crate::ring::RingParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReport {
    pub stages: usize,
    pub butterflies: usize,
    pub modmuls: usize,
}

impl TransformReport {
    fn add(&mut self, other: TransformReport) {
        self.stages += other.stages;
        self.butterflies += other.butterflies;
        self.modmuls += other.modmuls;
    }
}

fn low_mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    }
}

/// Compiles and runs transforms on a tiled subarray.
///
/// Every group of tiles runs the same op sequence on its own polynomial, so
/// one call transforms `layout.parallel` polynomials at once. Butterfly
/// operands are chosen purely by row address; only spilled slots (stored
/// in a neighbour tile) need word-alignment shifts.
#[derive(Clone, Debug)]
pub struct NttEngine {
    pub layout: TileLayout,
    pub kernel: Kernel,
    pub table: TwiddleTable,
    /// Modulus installed in every tile.
    pub q: u64,
    pub ring: Option<RingParams>,
}

impl NttEngine {
    /// `slots` is the number of coefficients each group must hold:
    /// `order` for a transform, `2·order` for a product.
    pub fn new(ring: &RingParams, dims: ArrayDims, slots: usize, config: ArithConfig) -> Result<Self> {
        let layout = layout_plan_with(dims, ring.width as usize, ring.order, slots, None)?;
        Self::with_layout(ring, layout, config)
    }

    pub fn with_layout(ring: &RingParams, layout: TileLayout, config: ArithConfig) -> Result<Self> {
        if layout.order != ring.order || layout.width != ring.width as usize {
            return Err(Error::LayoutMismatch(format!(
                "layout is for order {} width {}, ring has order {} width {}",
                layout.order, layout.width, ring.order, ring.width
            )));
        }
        let ctx = MontgomeryContext::new(ring.q, ring.width)?;
        ctx.check_headroom()?;
        let table = precompute_twiddles(ring, &ctx)?;
        let kernel = Kernel::new(layout.width, layout.consts, config)?;
        Ok(Self { layout, kernel, table, q: ring.q, ring: Some(*ring) })
    }

    /// Engine for op counting only: no ring exists behind it and every
    /// twiddle is `pattern` (its popcount sets the modmul cost).
    pub fn synthetic(layout: TileLayout, pattern: u64, config: ArithConfig) -> Result<Self> {
        let w = layout.width;
        let pattern = pattern & low_mask(w);
        let n = layout.order;
        let table = TwiddleTable { forward: vec![pattern; n - 1], inverse: vec![pattern; n - 1], n_inv: pattern, r2: pattern };
        let kernel = Kernel::new(w, layout.consts, config)?;
        let q = (low_mask(w - 1) >> 1) | 1;
        Ok(Self { layout, kernel, table, q, ring: None })
    }

    /// A fresh array with constants installed.
    pub fn subarray(&self, traced: bool) -> Result<Subarray> {
        let rows = self.layout.physical_rows();
        let mut arr = if traced {
            Subarray::new(rows, self.layout.dims.cols)?
        } else {
            Subarray::untraced(rows, self.layout.dims.cols)?
        };
        self.install(&mut arr)?;
        Ok(arr)
    }

    pub fn install<B: Backend + ?Sized>(&self, be: &mut B) -> Result<()> {
        let l = &self.layout;
        l.consts.install(be, l.dims.cols, l.width, &vec![self.q; l.tiles])?;
        let mut mask = BitRow::zeros(l.dims.cols);
        for g in 0..l.parallel {
            mask.set_field(l.column(g, 0), l.width, low_mask(l.width));
        }
        be.write_row(l.group_mask, &mask)
    }

    /// Writes operands: `operands[j][g]` is group `g`'s polynomial stored
    /// from slot `j·order`. Every touched row is written exactly once.
    pub fn load<B: Backend + ?Sized>(&self, be: &mut B, operands: &[&[Vec<u64>]]) -> Result<()> {
        let l = &self.layout;
        if operands.len() * l.order > l.slots {
            return Err(Error::CapacityExceeded { needed: operands.len() * l.order, available: l.slots });
        }
        let mut rows: BTreeMap<usize, BitRow> = BTreeMap::new();
        for (j, polys) in operands.iter().enumerate() {
            if polys.len() > l.parallel {
                return Err(Error::CapacityExceeded { needed: polys.len(), available: l.parallel });
            }
            for (g, p) in polys.iter().enumerate() {
                if p.len() != l.order {
                    return Err(Error::LengthMismatch { left: p.len(), right: l.order });
                }
                for (i, &c) in p.iter().enumerate() {
                    if c >= self.q {
                        return Err(Error::OperandOutOfRange { value: c as u128, bits: l.width as u32 });
                    }
                    let (o, r) = l.slot(j * l.order + i);
                    rows.entry(r)
                        .or_insert_with(|| BitRow::zeros(l.dims.cols))
                        .set_field(l.column(g, o), l.width, c);
                }
            }
        }
        rows.iter().try_for_each(|(&r, bits)| be.write_row(r, bits))
    }

    /// Reads `count` polynomials starting at slot `base`.
    pub fn read(&self, arr: &mut Subarray, base: usize, count: usize) -> Result<Vec<Vec<u64>>> {
        let l = &self.layout;
        let mut cache: BTreeMap<usize, BitRow> = BTreeMap::new();
        let mut out = vec![Vec::with_capacity(l.order); count.min(l.parallel)];
        for i in 0..l.order {
            let (o, r) = l.slot(base + i);
            if !cache.contains_key(&r) {
                cache.insert(r, arr.read_row(r)?);
            }
            let row = &cache[&r];
            for (g, poly) in out.iter_mut().enumerate() {
                poly.push(row.field(l.column(g, o), l.width));
            }
        }
        Ok(out)
    }

    fn align<B: Backend + ?Sized>(&self, be: &mut B, dir: ShiftDir, offset: usize) -> Result<()> {
        for _ in 0..offset * self.layout.width {
            be.shift(dir, ShiftScope::Align)?;
        }
        Ok(())
    }

    /// Row holding slot `s` at group offset 0: the slot's own row when it
    /// already sits there, else `buf` after alignment. `own` forces a copy.
    fn fetch<B: Backend + ?Sized>(&self, be: &mut B, s: usize, buf: usize, own: bool) -> Result<usize> {
        let (o, r) = self.layout.slot(s);
        if o == 0 && !own {
            return Ok(r);
        }
        self.kernel.load(be, r)?;
        self.align(be, ShiftDir::Right, o)?;
        be.writeback(buf)?;
        Ok(buf)
    }

    /// Writes `src` (value at group offset 0) to slot `s`, leaving the
    /// slot row's other tiles untouched in spilled layouts.
    fn store<B: Backend + ?Sized>(&self, be: &mut B, src: usize, s: usize) -> Result<()> {
        let l = &self.layout;
        let (o, r) = l.slot(s);
        if !l.spilled() {
            return if src == r { Ok(()) } else { self.kernel.copy(be, src, r) };
        }
        let [_, _, c1, _, c2, m] = l.scratch;
        let zero = l.consts.zero;
        let mask = if o == 0 {
            l.group_mask
        } else {
            self.kernel.load(be, l.group_mask)?;
            self.align(be, ShiftDir::Left, o)?;
            be.writeback(m)?;
            m
        };
        if o == 0 {
            be.activate(src, mask, Logic::And)?;
        } else {
            self.kernel.load(be, src)?;
            self.align(be, ShiftDir::Left, o)?;
            be.writeback(c1)?;
            be.activate(c1, mask, Logic::And)?;
        }
        be.writeback(c1)?;
        be.activate(mask, zero, Logic::Nor)?;
        be.writeback(c2)?;
        be.activate(c2, r, Logic::And)?;
        be.writeback(c2)?;
        be.activate(c1, c2, Logic::Or)?;
        be.writeback(r)
    }

    fn arith_scratch(&self) -> [usize; 4] {
        let [_, carry, c1, s1, c2, _] = self.layout.scratch;
        [carry, c1, s1, c2]
    }

    fn sum_row(&self) -> usize {
        self.layout.scratch[0]
    }

    /// `Sum := c · x · R^-1 mod q`.
    fn scale<B: Backend + ?Sized>(&self, be: &mut B, c: u64, x: usize) -> Result<()> {
        let rows = self.layout.rowmap(x);
        self.kernel.modmul_const(be, c, &rows)?;
        self.kernel.resolve(be, &rows)?;
        Ok(())
    }

    /// `(U, V) := (U + zV, U - zV)`.
    fn butterfly_ct<B: Backend + ?Sized>(&self, be: &mut B, u: usize, v: usize, z: u64) -> Result<()> {
        let [x, y] = self.layout.align;
        let spilled = self.layout.spilled();
        let u_in = self.fetch(be, u, x, false)?;
        let v_in = self.fetch(be, v, y, false)?;
        let (u_out, v_out) = if spilled { (x, y) } else { (u_in, v_in) };
        self.scale(be, z, v_in)?;
        let t = self.sum_row();
        self.kernel.modsub(be, u_in, t, v_out, self.arith_scratch())?;
        self.kernel.modadd(be, u_in, t, u_out, self.arith_scratch())?;
        if spilled {
            self.store(be, u_out, u)?;
            self.store(be, v_out, v)?;
        }
        Ok(())
    }

    /// `(U, V) := (U + V, z(U - V))`.
    fn butterfly_gs<B: Backend + ?Sized>(&self, be: &mut B, u: usize, v: usize, z: u64) -> Result<()> {
        let [x, y] = self.layout.align;
        let spilled = self.layout.spilled();
        let u_in = self.fetch(be, u, x, false)?;
        let v_in = self.fetch(be, v, y, false)?;
        let (u_out, v_out) = if spilled { (x, y) } else { (u_in, v_in) };
        let d = self.sum_row();
        self.kernel.modsub(be, u_in, v_in, d, self.arith_scratch())?;
        self.kernel.modadd(be, u_in, v_in, u_out, self.arith_scratch())?;
        self.kernel.copy(be, d, v_out)?;
        self.scale(be, z, v_out)?;
        if spilled {
            self.store(be, u_out, u)?;
            self.store(be, d, v)?;
        } else {
            self.kernel.copy(be, d, v_out)?;
        }
        Ok(())
    }

    /// Multiplies every slot in `base..base + order` by the scaled constant.
    pub fn scale_all<B: Backend + ?Sized>(&self, be: &mut B, base: usize, c: u64) -> Result<TransformReport> {
        let [x, _] = self.layout.align;
        for i in 0..self.layout.order {
            let s = base + i;
            let row = self.fetch(be, s, x, false)?;
            self.scale(be, c, row)?;
            self.store(be, self.sum_row(), s)?;
        }
        Ok(TransformReport { stages: 0, butterflies: 0, modmuls: self.layout.order })
    }

    /// In-place Cooley–Tukey transform of slots `base..base + order`;
    /// output in bit-reversed order.
    pub fn forward<B: Backend + ?Sized>(&self, be: &mut B, base: usize) -> Result<TransformReport> {
        let n = self.layout.order;
        let mut report = TransformReport::default();
        let mut len = n / 2;
        while len >= 1 {
            for start in (0..n).step_by(2 * len) {
                let k = n / (2 * len) + start / (2 * len);
                let z = self.table.zeta(k);
                for j in start..start + len {
                    self.butterfly_ct(be, base + j, base + j + len, z)?;
                }
                report.butterflies += len;
            }
            report.stages += 1;
            len /= 2;
        }
        report.modmuls = report.butterflies;
        Ok(report)
    }

    /// Gentleman–Sande inverse of [`NttEngine::forward`], including the
    /// final `order^-1` scaling.
    pub fn inverse<B: Backend + ?Sized>(&self, be: &mut B, base: usize) -> Result<TransformReport> {
        let n = self.layout.order;
        let mut report = TransformReport::default();
        let mut len = 1;
        while len < n {
            for start in (0..n).step_by(2 * len) {
                let k = n / (2 * len) + start / (2 * len);
                let z = self.table.zeta_inv(k);
                for j in start..start + len {
                    self.butterfly_gs(be, base + j, base + j + len, z)?;
                }
                report.butterflies += len;
            }
            report.stages += 1;
            len *= 2;
        }
        report.modmuls = report.butterflies;
        report.add(self.scale_all(be, base, self.table.n_inv)?);
        Ok(report)
    }

    /// `a_i := a_i · b_i · R^-1` for spectra at slots `a` and `b`.
    pub fn pointwise<B: Backend + ?Sized>(&self, be: &mut B, a: usize, b: usize) -> Result<TransformReport> {
        let [x, y] = self.layout.align;
        let spilled = self.layout.spilled();
        for i in 0..self.layout.order {
            let a_row = self.fetch(be, a + i, x, spilled)?;
            let b_row = self.fetch(be, b + i, y, false)?;
            let rows = self.layout.rowmap(b_row);
            self.kernel.modmul_rows(be, a_row, &rows)?;
            self.kernel.resolve(be, &rows)?;
            self.store(be, self.sum_row(), a + i)?;
        }
        Ok(TransformReport { stages: 0, butterflies: 0, modmuls: self.layout.order })
    }

    /// Negacyclic (or cyclic, per the ring) product of the polynomials at
    /// slots `0` and `order`, left at slot `0`.
    pub fn polymul<B: Backend + ?Sized>(&self, be: &mut B) -> Result<TransformReport> {
        let n = self.layout.order;
        let mut report = self.forward(be, 0)?;
        report.add(self.forward(be, n)?);
        report.add(self.scale_all(be, n, self.table.r2)?);
        report.add(self.pointwise(be, 0, n)?);
        report.add(self.inverse(be, 0)?);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{bit_reverse_permute, forward_batch, inverse_batch, polymul_batch};
    use super::*;
    use crate::oracle::{oracle_ntt, schoolbook};
    use crate::ring::Convolution;

    fn poly(seed: u64, n: usize, q: u64) -> Vec<u64> {
        (0..n as u64).map(|i| (i * i * 7919 + seed * 104729 + i * 31) % q).collect()
    }

    #[test]
    fn forward_matches_oracle() {
        for mode in [Convolution::Negacyclic, Convolution::Cyclic] {
            let ring = RingParams::new(257, 8, 10).unwrap().with_mode(mode);
            let polys: Vec<_> = (0..3).map(|s| poly(s, 8, 257)).collect();
            let got = forward_batch(&polys, &ring, ArrayDims::new(16, 30), ArithConfig::default()).unwrap();
            for (p, g) in polys.iter().zip(&got) {
                assert_eq!(bit_reverse_permute(g).unwrap(), oracle_ntt(p, &ring), "{mode:?}");
            }
            let back = inverse_batch(&got, &ring, ArrayDims::new(16, 30), ArithConfig::default()).unwrap();
            assert_eq!(back, polys);
        }
    }

    #[test]
    fn spilled_layout_agrees() {
        let ring = RingParams::new(257, 16, 10).unwrap();
        // 5 coefficient rows per tile: 16 slots span 4 tiles, 2 groups
        let dims = ArrayDims::new(11, 80);
        let engine = NttEngine::new(&ring, dims, 16, ArithConfig::default()).unwrap();
        assert_eq!((engine.layout.group, engine.layout.parallel), (4, 2));
        let polys: Vec<_> = (0..2).map(|s| poly(s, 16, 257)).collect();
        let got = forward_batch(&polys, &ring, dims, ArithConfig::default()).unwrap();
        for (p, g) in polys.iter().zip(&got) {
            assert_eq!(bit_reverse_permute(g).unwrap(), oracle_ntt(p, &ring));
        }
        assert_eq!(inverse_batch(&got, &ring, dims, ArithConfig::default()).unwrap(), polys);
    }

    #[test]
    fn products() {
        for (dims, mode) in [
            (ArrayDims::new(40, 40), Convolution::Negacyclic),
            (ArrayDims::new(40, 40), Convolution::Cyclic),
            (ArrayDims::new(14, 80), Convolution::Negacyclic),
        ] {
            let ring = RingParams::new(257, 16, 10).unwrap().with_mode(mode);
            let a: Vec<_> = (0..2).map(|s| poly(s, 16, 257)).collect();
            let b: Vec<_> = (0..2).map(|s| poly(s + 9, 16, 257)).collect();
            let got = polymul_batch(&a, &b, &ring, dims, ArithConfig::default()).unwrap();
            for g in 0..2 {
                assert_eq!(got[g], schoolbook(&a[g], &b[g], 257, mode).unwrap(), "{dims:?} {mode:?}");
            }
        }
    }

    #[test]
    fn butterfly_count() {
        let ring = RingParams::new(7681, 64, 14).unwrap();
        let engine = NttEngine::new(&ring, ArrayDims::new(80, 14), 64, ArithConfig::default()).unwrap();
        let mut counter = crate::bitcell::OpCounter::new();
        let r = engine.forward(&mut counter, 0).unwrap();
        assert_eq!((r.stages, r.butterflies), (6, 32 * 6));
        assert_eq!(counter.counts.shift_align, 0);
    }
}
