//! The six micro-ops on an 8x8 subarray.

use insram_ntt::bitcell::{BitRow, Logic, ShiftDir, ShiftScope, Subarray};

fn main() -> insram_ntt::Result<()> {
    let mut arr = Subarray::new(8, 8)?;
    arr.write_row(0, &BitRow::parse("1100_1010")?)?;
    arr.write_row(1, &BitRow::parse("1010_0110")?)?;

    for mode in Logic::ALL {
        arr.activate_pair(0, 1, mode)?;
        println!("{:<3} -> {}", mode.name(), arr.latch());
    }

    arr.activate_pair(0, 1, Logic::Or)?;
    arr.shift_latch(ShiftDir::Left, ShiftScope::Global)?;
    println!("OR << 1 global      {}", arr.latch());
    arr.activate_pair(0, 1, Logic::Or)?;
    arr.shift_latch(ShiftDir::Left, ShiftScope::Tile { width: 4, origin: 0 })?;
    println!("OR << 1 in 4-bit tiles {}", arr.latch());
    arr.latch_writeback(2)?;
    println!("row 2 = {}, latch zero? {}", arr.peek_row(2)?, arr.latch_is_zero());

    println!("\ntrace:");
    for (i, op) in arr.trace().iter().enumerate() {
        println!("{i:>3} {op}");
    }
    Ok(())
}
