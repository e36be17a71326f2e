use std::collections::HashMap;

use super::backend::{Backend, OpCounts};
use super::op::{Logic, MicroOp, ShiftDir, ShiftScope};
use super::row::{words_for, BitRow};
use super::state::ArrayState;
use crate::error::{Error, Result};

pub const DEFAULT_ROWS: usize = 256;
pub const DEFAULT_COLS: usize = 256;

/// Boundary masks for one tiling of the columns.
#[derive(Clone, Debug)]
struct TileMasks {
    /// First column of every tile (column 0 included).
    low: Vec<u64>,
    /// Last column of every tile (column `cols - 1` included).
    high: Vec<u64>,
}

impl TileMasks {
    fn new(cols: usize, width: usize, origin: usize) -> Self {
        let words = words_for(cols);
        let mut low = vec![0u64; words];
        let mut high = vec![0u64; words];
        let set = |mask: &mut Vec<u64>, c: usize| mask[c / 64] |= 1 << (c % 64);
        set(&mut low, 0);
        set(&mut high, cols - 1);
        let mut start = origin;
        while start < cols {
            set(&mut low, start);
            if start > 0 {
                set(&mut high, start - 1);
            }
            start += width;
        }
        Self { low, high }
    }
}

/// Tracks bits that a global shift carries across tile boundaries (or off the
/// array edge) for one assumed tile width.
#[derive(Clone, Debug)]
pub struct ShiftAudit {
    pub width: usize,
    masks_low: Vec<u64>,
    masks_high: Vec<u64>,
    /// Global shifts inspected.
    pub checked: u64,
    /// Total boundary-crossing 1 bits seen.
    pub leaked_bits: u64,
    /// Global left shifts that had a 1 in some tile's MSB.
    pub left_violations: u64,
    /// Global right shifts that had a 1 in some tile's LSB.
    pub right_violations: u64,
}

/// One SRAM subarray: a bit grid plus a sense-amplifier latch row.
///
/// The only state-changing operations are the micro-ops of [`MicroOp`]; each
/// is appended to the trace when tracing is on and always tallied in
/// [`OpCounts`].
#[derive(Clone, Debug)]
pub struct Subarray {
    rows: usize,
    cols: usize,
    words: usize,
    cells: Vec<u64>,
    latch: Vec<u64>,
    trace: Option<Vec<MicroOp>>,
    counts: OpCounts,
    audit: Option<ShiftAudit>,
    tile_masks: HashMap<(usize, usize), TileMasks>,
}

impl Subarray {
    /// Creates an all-zero subarray with tracing enabled.
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 8 || cols < 4 {
            return Err(Error::DimensionTooSmall { rows, cols });
        }
        let words = words_for(cols);
        Ok(Self {
            rows,
            cols,
            words,
            cells: vec![0; rows * words],
            latch: vec![0; words],
            trace: Some(Vec::new()),
            counts: OpCounts::default(),
            audit: None,
            tile_masks: HashMap::new(),
        })
    }

    /// Subarray without a trace; counts are still kept.
    pub fn untraced(rows: usize, cols: usize) -> Result<Self> {
        let mut arr = Self::new(rows, cols)?;
        arr.trace = None;
        Ok(arr)
    }

    pub fn from_state(state: &ArrayState) -> Result<Self> {
        let mut arr = Self::new(state.rows(), state.cols())?;
        for (r, row) in state.cells().iter().enumerate() {
            arr.row_words_mut(r).copy_from_slice(row.words());
        }
        arr.latch.copy_from_slice(state.latch().words());
        Ok(arr)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set_tracing(&mut self, on: bool) {
        match (on, self.trace.is_some()) {
            (true, false) => self.trace = Some(Vec::new()),
            (false, true) => self.trace = None,
            _ => {}
        }
    }

    pub fn trace(&self) -> &[MicroOp] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn take_trace(&mut self) -> Vec<MicroOp> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn counts(&self) -> &OpCounts {
        &self.counts
    }

    pub fn reset_counts(&mut self) {
        self.counts = OpCounts::default();
    }

    /// Starts auditing global shifts against tiles of `width` columns.
    pub fn enable_shift_audit(&mut self, width: usize) {
        let masks = TileMasks::new(self.cols, width, 0);
        self.audit = Some(ShiftAudit {
            width,
            masks_low: masks.low,
            masks_high: masks.high,
            checked: 0,
            leaked_bits: 0,
            left_violations: 0,
            right_violations: 0,
        });
    }

    pub fn shift_audit(&self) -> Option<&ShiftAudit> {
        self.audit.as_ref()
    }

    fn check_addr(&self, addr: usize) -> Result<()> {
        if addr < self.rows {
            Ok(())
        } else {
            Err(Error::RowOutOfRange { addr, rows: self.rows })
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.cells[r * self.words..(r + 1) * self.words]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.cells[r * self.words..(r + 1) * self.words]
    }

    fn push(&mut self, op: MicroOp) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(op);
        }
    }

    pub fn write_row(&mut self, addr: usize, bits: &BitRow) -> Result<()> {
        self.check_addr(addr)?;
        if bits.cols() != self.cols {
            return Err(Error::WidthMismatch { expected: self.cols, got: bits.cols() });
        }
        self.row_words_mut(addr).copy_from_slice(bits.words());
        self.counts.write_row += 1;
        if self.trace.is_some() {
            self.push(MicroOp::WriteRow { row: addr, bits: bits.clone() });
        }
        Ok(())
    }

    /// Host read of a row (counted as I/O, not traced).
    pub fn read_row(&mut self, addr: usize) -> Result<BitRow> {
        let row = self.peek_row(addr)?;
        self.counts.host_read += 1;
        Ok(row)
    }

    /// Inspects a row without charging I/O.
    pub fn peek_row(&self, addr: usize) -> Result<BitRow> {
        self.check_addr(addr)?;
        Ok(BitRow::from_words(self.cols, self.row_words(addr).to_vec()))
    }

    pub fn latch(&self) -> BitRow {
        BitRow::from_words(self.cols, self.latch.clone())
    }

    /// Two-row bitline compute; the result lands in the latch.
    pub fn activate_pair(&mut self, a: usize, b: usize, mode: Logic) -> Result<()> {
        self.check_addr(a)?;
        self.check_addr(b)?;
        if a == b {
            return Err(Error::SameRowActivation(a));
        }
        let w = self.words;
        let (ra, rb) = (a * w, b * w);
        for i in 0..w {
            self.latch[i] = mode.apply(self.cells[ra + i], self.cells[rb + i]);
        }
        self.clear_latch_tail();
        self.counts.record_activate(mode);
        self.push(MicroOp::Activate { a, b, mode });
        Ok(())
    }

    pub fn shift_latch(&mut self, dir: ShiftDir, scope: ShiftScope) -> Result<()> {
        if let ShiftScope::Tile { width, origin } = scope {
            if width < 2 || width > self.cols || origin >= width.max(1) || origin >= self.cols {
                return Err(Error::InvalidTileGeometry { width, origin, cols: self.cols });
            }
        }
        if scope == ShiftScope::Global {
            self.audit_shift(dir);
        }
        match dir {
            ShiftDir::Left => shl1(&mut self.latch),
            ShiftDir::Right => shr1(&mut self.latch),
        }
        self.clear_latch_tail();
        if let ShiftScope::Tile { width, origin } = scope {
            let cols = self.cols;
            let masks = self
                .tile_masks
                .entry((width, origin))
                .or_insert_with(|| TileMasks::new(cols, width, origin));
            // Bits that crossed a boundary now sit on the first (left shift) or
            // last (right shift) column of a tile.
            let clear = match dir {
                ShiftDir::Left => &masks.low,
                ShiftDir::Right => &masks.high,
            };
            for (l, m) in self.latch.iter_mut().zip(clear) {
                *l &= !m;
            }
        }
        self.counts.record_shift(scope);
        self.push(MicroOp::Shift { dir, scope });
        Ok(())
    }

    fn audit_shift(&mut self, dir: ShiftDir) {
        let Some(audit) = self.audit.as_mut() else { return };
        let mask = match dir {
            ShiftDir::Left => &audit.masks_high,
            ShiftDir::Right => &audit.masks_low,
        };
        let leaked: u64 = self.latch.iter().zip(mask).map(|(l, m)| (l & m).count_ones() as u64).sum();
        audit.checked += 1;
        audit.leaked_bits += leaked;
        if leaked > 0 {
            match dir {
                ShiftDir::Left => audit.left_violations += 1,
                ShiftDir::Right => audit.right_violations += 1,
            }
        }
    }

    pub fn latch_writeback(&mut self, addr: usize) -> Result<()> {
        self.check_addr(addr)?;
        let w = self.words;
        self.cells[addr * w..(addr + 1) * w].copy_from_slice(&self.latch);
        self.counts.writeback += 1;
        self.push(MicroOp::Writeback { row: addr });
        Ok(())
    }

    pub fn latch_is_zero(&mut self) -> bool {
        let result = self.latch.iter().all(|&w| w == 0);
        self.counts.zero_test += 1;
        self.push(MicroOp::ZeroTest { result });
        result
    }

    /// Applies one recorded op. A recorded ZERO_TEST outcome that disagrees
    /// with the current latch is reported as divergence.
    pub fn execute(&mut self, op: &MicroOp) -> Result<()> {
        match op {
            MicroOp::ZeroTest { result } => {
                let seen = self.latch_is_zero();
                if seen != *result {
                    return Err(Error::ReplayDiverged {
                        seq: self.counts.micro_ops() as usize,
                        msg: format!("zero test recorded {result}, observed {seen}"),
                    });
                }
                Ok(())
            }
            other => self.emit(other),
        }
    }

    pub fn snapshot(&self) -> ArrayState {
        let cells = (0..self.rows)
            .map(|r| BitRow::from_words(self.cols, self.row_words(r).to_vec()))
            .collect();
        ArrayState::new(self.rows, self.cols, cells, self.latch())
    }

    fn clear_latch_tail(&mut self) {
        let rem = self.cols % 64;
        if rem != 0 {
            if let Some(last) = self.latch.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Backend for Subarray {
    fn write_row(&mut self, row: usize, bits: &BitRow) -> Result<()> {
        Subarray::write_row(self, row, bits)
    }

    fn activate(&mut self, a: usize, b: usize, mode: Logic) -> Result<()> {
        self.activate_pair(a, b, mode)
    }

    fn shift(&mut self, dir: ShiftDir, scope: ShiftScope) -> Result<()> {
        self.shift_latch(dir, scope)
    }

    fn writeback(&mut self, row: usize) -> Result<()> {
        self.latch_writeback(row)
    }

    fn zero_test(&mut self) -> Result<bool> {
        Ok(self.latch_is_zero())
    }
}

fn shl1(words: &mut [u64]) {
    let mut carry = 0u64;
    for w in words.iter_mut() {
        let next = *w >> 63;
        *w = (*w << 1) | carry;
        carry = next;
    }
}

fn shr1(words: &mut [u64]) {
    let mut carry = 0u64;
    for w in words.iter_mut().rev() {
        let next = *w & 1;
        *w = (*w >> 1) | (carry << 63);
        carry = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr4() -> Subarray {
        Subarray::new(8, 4).unwrap()
    }

    #[test]
    fn create_checks_dimensions() {
        let arr = Subarray::new(256, 256).unwrap();
        assert_eq!(arr.snapshot().cells().iter().map(|r| r.count_ones()).sum::<u32>(), 0);
        assert_eq!(arr.rows() * arr.cols(), 65536);
        let small = Subarray::new(8, 4).unwrap();
        assert!(small.trace().is_empty());
        assert!(small.latch().is_zero());
        assert!(matches!(Subarray::new(2, 4), Err(Error::DimensionTooSmall { .. })));
        assert!(Subarray::new(8, 3).is_err());
    }

    #[test]
    fn write_read_identity() {
        let mut arr = Subarray::new(8, 8).unwrap();
        let bits = BitRow::parse("10110000").unwrap();
        arr.write_row(0, &bits).unwrap();
        assert_eq!(arr.read_row(0).unwrap(), bits);
        assert!(arr.read_row(5).unwrap().is_zero());
        assert!(matches!(arr.write_row(8, &bits), Err(Error::RowOutOfRange { .. })));
        assert!(arr.write_row(1, &BitRow::zeros(4)).is_err());
    }

    #[test]
    fn activate_truth_tables() {
        let mut arr = arr4();
        arr.write_row(0, &BitRow::parse("1100").unwrap()).unwrap();
        arr.write_row(1, &BitRow::parse("1010").unwrap()).unwrap();
        for (mode, want) in [(Logic::And, "1000"), (Logic::Xor, "0110"), (Logic::Nor, "0001"), (Logic::Or, "1110")] {
            arr.activate_pair(0, 1, mode).unwrap();
            assert_eq!(arr.latch().to_string(), want, "{mode:?}");
        }
        assert_eq!(arr.peek_row(0).unwrap().to_string(), "1100");
        assert!(matches!(arr.activate_pair(1, 1, Logic::And), Err(Error::SameRowActivation(1))));
        assert!(arr.activate_pair(1, 9, Logic::And).is_err());
    }

    #[test]
    fn shifts() {
        let mut arr = arr4();
        arr.write_row(0, &BitRow::parse("0011").unwrap()).unwrap();
        arr.write_row(1, &BitRow::parse("1111").unwrap()).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Tile { width: 4, origin: 0 }).unwrap();
        assert_eq!(arr.latch().to_string(), "0110");

        arr.write_row(0, &BitRow::parse("1000").unwrap()).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Right, ShiftScope::Global).unwrap();
        assert_eq!(arr.latch().to_string(), "0100");

        arr.write_row(0, &BitRow::parse("11|00").unwrap()).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Tile { width: 2, origin: 0 }).unwrap();
        assert_eq!(arr.latch().to_string(), "1000");

        arr.write_row(0, &BitRow::parse("00|11").unwrap()).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Tile { width: 2, origin: 0 }).unwrap();
        assert_eq!(arr.latch().to_string(), "0010", "tile MSB must not leak upward");
        arr.shift_latch(ShiftDir::Right, ShiftScope::Tile { width: 2, origin: 0 }).unwrap();
        assert_eq!(arr.latch().to_string(), "0001");

        for bad in [
            ShiftScope::Tile { width: 1, origin: 0 },
            ShiftScope::Tile { width: 8, origin: 0 },
            ShiftScope::Tile { width: 2, origin: 2 },
        ] {
            assert!(matches!(arr.shift_latch(ShiftDir::Left, bad), Err(Error::InvalidTileGeometry { .. })));
        }
    }

    #[test]
    fn tile_shift_with_origin_and_remainder() {
        // 10 columns, width 4, origin 1: tiles [0,1) [1,5) [5,9) [9,10)
        let mut arr = Subarray::new(8, 10).unwrap();
        arr.write_row(0, &BitRow::ones(10)).unwrap();
        arr.write_row(1, &BitRow::ones(10)).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Tile { width: 4, origin: 1 }).unwrap();
        assert_eq!(arr.latch().to_string(), "0111011100");
    }

    #[test]
    fn writeback_and_zero_test() {
        let mut arr = arr4();
        assert!(arr.latch_is_zero());
        arr.write_row(0, &BitRow::parse("1010").unwrap()).unwrap();
        arr.write_row(1, &BitRow::parse("1111").unwrap()).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        assert!(!arr.latch_is_zero());
        arr.latch_writeback(2).unwrap();
        arr.latch_writeback(3).unwrap();
        assert_eq!(arr.peek_row(2).unwrap(), arr.peek_row(3).unwrap());
        assert_eq!(arr.latch().to_string(), "1010");
        arr.activate_pair(2, 1, Logic::Xor).unwrap();
        assert_eq!(arr.latch().to_string(), "0101");
        assert!(arr.latch_writeback(8).is_err());
        assert_eq!(arr.trace().last(), Some(&MicroOp::Activate { a: 2, b: 1, mode: Logic::Xor }));
    }

    #[test]
    fn multiword_shift_carries() {
        let mut arr = Subarray::new(8, 130).unwrap();
        let mut bits = BitRow::zeros(130);
        bits.set(63, true);
        bits.set(128, true);
        arr.write_row(0, &bits).unwrap();
        arr.write_row(1, &BitRow::ones(130)).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Global).unwrap();
        let l = arr.latch();
        assert!(l.get(64) && l.get(129) && l.count_ones() == 2);
        arr.shift_latch(ShiftDir::Left, ShiftScope::Global).unwrap();
        assert_eq!(arr.latch().count_ones(), 1, "bit falls off the top edge");
        arr.shift_latch(ShiftDir::Right, ShiftScope::Global).unwrap();
        assert!(arr.latch().get(64));
    }

    #[test]
    fn audit_counts_boundary_bits() {
        let mut arr = Subarray::new(8, 8).unwrap();
        arr.enable_shift_audit(4);
        arr.write_row(0, &BitRow::parse("0000_1000").unwrap()).unwrap();
        arr.write_row(1, &BitRow::ones(8)).unwrap();
        arr.activate_pair(0, 1, Logic::And).unwrap();
        arr.shift_latch(ShiftDir::Left, ShiftScope::Global).unwrap();
        arr.shift_latch(ShiftDir::Right, ShiftScope::Global).unwrap();
        let audit = arr.shift_audit().unwrap();
        assert_eq!((audit.checked, audit.left_violations, audit.right_violations), (2, 1, 1));
    }
}
