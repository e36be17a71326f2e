//! How many coefficients fit, and where overflow spills.

use insram_ntt::ntt::{layout_plan, ArrayDims};

fn main() -> insram_ntt::Result<()> {
    let dims = ArrayDims::default();
    for width in [256, 64, 32, 16, 14] {
        let l = layout_plan(dims, width, 2)?;
        println!("width {width:>3}: {:>2} tiles x {} rows = {:>4} points max", l.tiles, l.coeff_rows, l.capacity());
    }

    let l = layout_plan(dims, 16, 256)?;
    println!("\norder 256 at width 16: groups of {} tiles, {} polynomials side by side", l.group, l.parallel);
    for (slot, offset, row) in l.spill_map() {
        println!("  coefficient {slot} -> tile +{offset}, row {row}");
    }
    println!("4501 points at width 14: {}", layout_plan(dims, 14, 4501).unwrap_err());
    Ok(())
}
