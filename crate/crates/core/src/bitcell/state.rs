use sha2::{Digest, Sha256};

use super::row::BitRow;
use crate::error::{Error, Result};

/// Complete contents of a subarray (grid plus latch), used for replay checks
/// and as the on-disk initial-state format.
///
/// Text form:
/// ```text
/// # insram-ntt state v1
/// dims <rows> <cols>
/// latch <hex>
/// row <index> <hex>      (all-zero rows omitted)
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayState {
    rows: usize,
    cols: usize,
    cells: Vec<BitRow>,
    latch: BitRow,
}

impl ArrayState {
    pub fn new(rows: usize, cols: usize, cells: Vec<BitRow>, latch: BitRow) -> Self {
        assert_eq!(cells.len(), rows);
        Self { rows, cols, cells, latch }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BitRow::zeros(cols); rows], BitRow::zeros(cols))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[BitRow] {
        &self.cells
    }

    pub fn latch(&self) -> &BitRow {
        &self.latch
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# insram-ntt state v1\ndims {} {}\nlatch {}\n", self.rows, self.cols, self.latch.to_hex());
        for (r, row) in self.cells.iter().enumerate() {
            if !row.is_zero() {
                out.push_str(&format!("row {r} {}\n", row.to_hex()));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut state: Option<ArrayState> = None;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let err = |msg: String| Error::TraceParse { line: lineno, msg };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("bad number {s:?}: {e}")));
            match (parts[0], state.as_mut()) {
                ("dims", None) if parts.len() == 3 => {
                    state = Some(ArrayState::zeros(num(parts[1])?, num(parts[2])?));
                }
                ("latch", Some(s)) if parts.len() == 2 => {
                    s.latch = BitRow::from_hex(s.cols, parts[1]).map_err(|e| err(e.to_string()))?;
                }
                ("row", Some(s)) if parts.len() == 3 => {
                    let r = num(parts[1])?;
                    if r >= s.rows {
                        return Err(err(format!("row {r} out of range")));
                    }
                    s.cells[r] = BitRow::from_hex(s.cols, parts[2]).map_err(|e| err(e.to_string()))?;
                }
                _ => return Err(err(format!("unexpected line {line:?}"))),
            }
        }
        state.ok_or(Error::TraceParse { line: 0, msg: "missing dims line".into() })
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cells = vec![BitRow::zeros(12); 8];
        cells[3] = BitRow::from_tiles(12, 4, &[1, 2, 3]);
        let state = ArrayState::new(8, 12, cells, BitRow::from_tiles(12, 4, &[0xf]));
        let text = state.to_text();
        assert_eq!(ArrayState::from_text(&text).unwrap(), state);
        assert_eq!(state.digest().len(), 64);
        assert!(ArrayState::from_text("latch 0").is_err());
    }
}
