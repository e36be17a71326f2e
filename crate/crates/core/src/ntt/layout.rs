use serde::{Deserialize, Serialize};

use crate::arith::{ConstRows, ModMulRowMap};
use crate::error::{Error, Result};

pub const SCRATCH_ROWS: usize = 6;

/// Rows outside the data array: the four constants, the group mask and two
/// alignment buffers for spilled operands.
pub const PERIPHERY_ROWS: usize = ConstRows::COUNT + 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayDims {
    pub rows: usize,
    pub cols: usize,
}

impl ArrayDims {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
}

impl Default for ArrayDims {
    fn default() -> Self {
        Self::new(256, 256)
    }
}

/// Where coefficients, scratch and constants live.
///
/// Coefficient slot `s` sits in row `s % coeff_rows` of tile offset
/// `s / coeff_rows` inside its group; a group is `group` adjacent tiles
/// holding one polynomial (plus any second operand). All groups run the
/// same command stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileLayout {
    pub dims: ArrayDims,
    pub width: usize,
    pub tiles: usize,
    pub coeff_rows: usize,
    pub scratch: [usize; SCRATCH_ROWS],
    pub consts: ConstRows,
    /// Ones across offset 0 of every group; used to merge spilled writes.
    pub group_mask: usize,
    /// Buffers holding spilled operands after alignment to offset 0.
    pub align: [usize; 2],
    pub order: usize,
    /// Coefficient slots per group (`order`, or `2·order` for a product).
    pub slots: usize,
    pub group: usize,
    pub parallel: usize,
}

impl TileLayout {
    pub fn capacity(&self) -> usize {
        self.tiles * self.coeff_rows
    }

    pub fn spilled(&self) -> bool {
        self.group > 1
    }

    /// Rows of the simulated array, periphery included.
    pub fn physical_rows(&self) -> usize {
        self.dims.rows + PERIPHERY_ROWS
    }

    /// `(tile offset within group, row)` of slot `s`.
    pub fn slot(&self, s: usize) -> (usize, usize) {
        (s / self.coeff_rows, s % self.coeff_rows)
    }

    /// Slots stored outside the group's first tile, with their location.
    pub fn spill_map(&self) -> Vec<(usize, usize, usize)> {
        (self.coeff_rows.min(self.slots)..self.slots)
            .map(|s| {
                let (o, r) = self.slot(s);
                (s, o, r)
            })
            .collect()
    }

    /// First column of tile `offset` in group `g`.
    pub fn column(&self, g: usize, offset: usize) -> usize {
        (g * self.group + offset) * self.width
    }

    pub fn rowmap(&self, b: usize) -> ModMulRowMap {
        ModMulRowMap::new(b, self.scratch, self.consts)
    }
}

/// Plans a transform-only layout (`order` slots per group).
pub fn layout_plan(dims: ArrayDims, width: usize, order: usize) -> Result<TileLayout> {
    if width < 3 {
        return Err(Error::Config(format!("tile width {width} < 3")));
    }
    layout_plan_with(dims, width, order, order, None)
}

/// Full planner: `slots` coefficient slots per group, `coeff_rows`
/// defaulting to every row not used as scratch.
pub fn layout_plan_with(
    dims: ArrayDims,
    width: usize,
    order: usize,
    slots: usize,
    coeff_rows: Option<usize>,
) -> Result<TileLayout> {
    if width < 2 {
        return Err(Error::Config(format!("tile width {width} < 2")));
    }
    if dims.rows <= SCRATCH_ROWS {
        return Err(Error::DimensionTooSmall { rows: dims.rows, cols: dims.cols });
    }
    let coeff_rows = coeff_rows.unwrap_or(dims.rows - SCRATCH_ROWS);
    if coeff_rows == 0 || coeff_rows + SCRATCH_ROWS > dims.rows {
        return Err(Error::Config(format!(
            "{coeff_rows} coefficient rows + {SCRATCH_ROWS} scratch rows exceed {} rows",
            dims.rows
        )));
    }
    let tiles = dims.cols / width;
    if tiles == 0 {
        return Err(Error::CapacityExceeded { needed: width, available: dims.cols });
    }
    let group = slots.div_ceil(coeff_rows).max(1);
    if group > tiles {
        return Err(Error::CapacityExceeded { needed: slots, available: tiles * coeff_rows });
    }
    let scratch = std::array::from_fn(|i| coeff_rows + i);
    let base = dims.rows;
    Ok(TileLayout {
        dims,
        width,
        tiles,
        coeff_rows,
        scratch,
        consts: ConstRows::at(base),
        group_mask: base + ConstRows::COUNT,
        align: [base + ConstRows::COUNT + 1, base + ConstRows::COUNT + 2],
        order,
        slots,
        group,
        parallel: tiles / group,
    })
}
