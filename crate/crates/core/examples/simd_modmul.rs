//! One op stream multiplies every tile by the same constant, whatever each
//! tile's modulus is; a row-operand variant multiplies tile-wise.

use insram_ntt::arith::{compile_twiddle_commands, ArithConfig, Bench, MontgomeryContext};
use insram_ntt::oracle::oracle_montmul;

fn main() -> insram_ntt::Result<()> {
    let width = 16;
    let moduli = [7681u64, 12289, 3329, 257, 17, 30011];
    let b: Vec<u64> = moduli.iter().map(|&m| m - 2).collect();
    let a = 0xBEEF;

    let mut bench = Bench::new(width, &moduli, ArithConfig::default())?;
    let ctx = MontgomeryContext::new(7681, width as u32)?;
    let stream = compile_twiddle_commands(a, &ctx, &bench.rows)?;
    let counts = stream.counts();
    println!(
        "A = {a:#x} (popcount {}): {} ops, {} global + {} tile shifts",
        a.count_ones(),
        stream.len(),
        counts.shift_global,
        counts.shift_tile
    );

    let got = bench.modmul_const(a, &b)?;
    for ((&m, &x), &y) in moduli.iter().zip(&b).zip(&got) {
        let want = oracle_montmul(a as u128, x as u128, m, width as u32)?;
        println!("M = {m:>5}  B = {x:>5}  ->  {y:>5}  (oracle {want})");
    }

    let a_rows: Vec<u64> = moduli.iter().map(|&m| m / 3).collect();
    let got = bench.modmul_rows(&a_rows, &b)?;
    println!("tile-wise products: {got:?}");
    Ok(())
}
