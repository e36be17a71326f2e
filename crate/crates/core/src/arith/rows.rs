use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bitcell::{Backend, BitRow};
use crate::error::{Error, Result};

/// Rows holding constants that every tile needs.
///
/// `one` holds 1 in each tile (the LSB mask), `top` holds `2^(w-1)` in each
/// tile (the MSB mask) and `modulus` holds each tile's modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstRows {
    pub zero: usize,
    pub one: usize,
    pub top: usize,
    pub modulus: usize,
}

impl ConstRows {
    pub const COUNT: usize = 4;

    /// Four consecutive rows starting at `base`.
    pub fn at(base: usize) -> Self {
        Self { zero: base, one: base + 1, top: base + 2, modulus: base + 3 }
    }

    pub fn all(&self) -> [usize; 4] {
        [self.zero, self.one, self.top, self.modulus]
    }

    /// Writes the constants for `moduli.len()` tiles of `width` columns.
    pub fn install<B: Backend + ?Sized>(&self, be: &mut B, cols: usize, width: usize, moduli: &[u64]) -> Result<()> {
        let tiles = moduli.len();
        if tiles * width > cols {
            return Err(Error::LayoutMismatch(format!("{tiles} tiles of width {width} exceed {cols} columns")));
        }
        be.write_row(self.zero, &BitRow::zeros(cols))?;
        be.write_row(self.one, &BitRow::splat(cols, width, tiles, 1))?;
        be.write_row(self.top, &BitRow::splat(cols, width, tiles, 1u64 << (width - 1)))?;
        be.write_row(self.modulus, &BitRow::from_tiles(cols, width, moduli))?;
        Ok(())
    }
}

/// Row assignment for one carry-save Montgomery multiplication.
///
/// Six scratch rows suffice: the second partial sum `s2` reuses the `s1` row
/// and the third carry `c3` reuses the `c1` row, because each predecessor is
/// dead by the time its alias is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModMulRowMap {
    pub b: usize,
    pub sum: usize,
    pub carry: usize,
    pub c1: usize,
    pub s1: usize,
    pub c2: usize,
    pub m: usize,
    pub consts: ConstRows,
}

impl ModMulRowMap {
    /// Scratch rows `[sum, carry, c1, s1, c2, m]` taken from `scratch`.
    pub fn new(b: usize, scratch: [usize; 6], consts: ConstRows) -> Self {
        let [sum, carry, c1, s1, c2, m] = scratch;
        Self { b, sum, carry, c1, s1, c2, m, consts }
    }

    pub fn scratch(&self) -> [usize; 6] {
        [self.sum, self.carry, self.c1, self.s1, self.c2, self.m]
    }

    pub fn with_b(mut self, b: usize) -> Self {
        self.b = b;
        self
    }

    pub fn validate(&self, rows: usize) -> Result<()> {
        let mut all = vec![self.b];
        all.extend(self.scratch());
        all.extend(self.consts.all());
        let distinct: HashSet<_> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return Err(Error::LayoutMismatch(format!("row map reuses an address: {all:?}")));
        }
        if let Some(&bad) = all.iter().find(|&&r| r >= rows) {
            return Err(Error::RowOutOfRange { addr: bad, rows });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_aliases() {
        let consts = ConstRows::at(10);
        let map = ModMulRowMap::new(0, [1, 2, 3, 4, 5, 6], consts);
        map.validate(14).unwrap();
        assert!(map.validate(13).is_err());
        assert!(map.with_b(3).validate(14).is_err());
        assert!(ModMulRowMap::new(0, [1, 2, 3, 4, 5, 10], consts).validate(14).is_err());
    }
}
