use std::fmt;

use crate::error::{Error, Result};

/// A row of bits, one per column. Column 0 is the least significant bit.
///
/// Textual forms (`Display`, [`BitRow::parse`], [`BitRow::to_hex`]) are written
/// most-significant column first, so a 4-column row holding the value 3 in
/// columns 0..4 prints as `0011`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    cols: usize,
}

pub(crate) fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl BitRow {
    pub fn zeros(cols: usize) -> Self {
        Self { words: vec![0; words_for(cols)], cols }
    }

    pub fn ones(cols: usize) -> Self {
        let mut row = Self { words: vec![u64::MAX; words_for(cols)], cols };
        row.clear_tail();
        row
    }

    pub(crate) fn from_words(cols: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(cols), 0);
        let mut row = Self { words, cols };
        row.clear_tail();
        row
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut row = Self::zeros(bits.len());
        for (c, &b) in bits.iter().enumerate() {
            row.set(c, b);
        }
        row
    }

    /// Parses an MSB-first string of `0`/`1`; `_`, `|` and spaces are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let digits: Vec<bool> = text
            .chars()
            .filter(|c| !matches!(c, '_' | '|' | ' '))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::TraceParse { line: 0, msg: format!("bad bit character {other:?}") }),
            })
            .collect::<Result<_>>()?;
        let bits: Vec<bool> = digits.into_iter().rev().collect();
        Ok(Self::from_bits(&bits))
    }

    /// Builds a row holding `values[t]` in tile `t` (tile `t` spans columns
    /// `t*width .. (t+1)*width`, LSB at the lowest column).
    pub fn from_tiles(cols: usize, width: usize, values: &[u64]) -> Self {
        let mut row = Self::zeros(cols);
        for (t, &v) in values.iter().enumerate() {
            row.set_field(t * width, width, v);
        }
        row
    }

    /// Same value replicated into the first `tiles` tiles.
    pub fn splat(cols: usize, width: usize, tiles: usize, value: u64) -> Self {
        let mut row = Self::zeros(cols);
        for t in 0..tiles {
            row.set_field(t * width, width, value);
        }
        row
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, col: usize) -> bool {
        assert!(col < self.cols, "column {col} out of range");
        (self.words[col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn set(&mut self, col: usize, bit: bool) {
        assert!(col < self.cols, "column {col} out of range");
        let mask = 1u64 << (col % 64);
        if bit {
            self.words[col / 64] |= mask;
        } else {
            self.words[col / 64] &= !mask;
        }
    }

    /// Reads `width` (≤ 64) bits starting at column `start`.
    pub fn field(&self, start: usize, width: usize) -> u64 {
        assert!(width <= 64 && start + width <= self.cols);
        let mut v = 0u64;
        for i in 0..width {
            if self.get(start + i) {
                v |= 1 << i;
            }
        }
        v
    }

    pub fn set_field(&mut self, start: usize, width: usize, value: u64) {
        assert!(width <= 64 && start + width <= self.cols, "field exceeds row");
        for i in 0..width {
            self.set(start + i, (value >> i) & 1 == 1);
        }
    }

    pub fn tile_value(&self, width: usize, tile: usize) -> u64 {
        self.field(tile * width, width)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.cols).map(|c| self.get(c)).collect()
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// MSB-first hexadecimal, exactly `ceil(cols / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.cols.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let c = d * 4 + b;
                if c < self.cols && self.get(c) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(cols: usize, hex: &str) -> Result<Self> {
        let mut row = Self::zeros(cols);
        for (i, ch) in hex.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| Error::TraceParse {
                line: 0,
                msg: format!("bad hex digit {ch:?}"),
            })?;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let c = i * 4 + b;
                    if c >= cols {
                        return Err(Error::WidthMismatch { expected: cols, got: c + 1 });
                    }
                    row.set(c, true);
                }
            }
        }
        Ok(row)
    }

    fn clear_tail(&mut self) {
        let rem = self.cols % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in (0..self.cols).rev() {
            f.write_str(if self.get(c) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_is_msb_first() {
        let row = BitRow::parse("0011").unwrap();
        assert!(row.get(0) && row.get(1) && !row.get(2) && !row.get(3));
        assert_eq!(row.to_string(), "0011");
    }

    #[test]
    fn tiles_and_hex() {
        let row = BitRow::from_tiles(16, 4, &[0x5, 0xa, 0x0, 0xf]);
        assert_eq!(row.to_hex(), "f0a5");
        assert_eq!(BitRow::from_hex(16, "f0a5").unwrap(), row);
        assert_eq!(row.tile_value(4, 1), 0xa);
        assert_eq!(BitRow::from_hex(6, "3f").unwrap().count_ones(), 6);
        assert!(BitRow::from_hex(6, "ff").is_err());
    }

    #[test]
    fn ones_clears_tail() {
        let row = BitRow::ones(70);
        assert_eq!(row.count_ones(), 70);
    }
}
