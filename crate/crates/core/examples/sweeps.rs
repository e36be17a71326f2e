//! Cycle and energy trends over coefficient width and polynomial order.

use insram_ntt::arith::ArithConfig;
use insram_ntt::ntt::ArrayDims;
use insram_ntt::perf::{sweep_bitwidth, sweep_order, to_csv, CostModel};

fn main() -> insram_ntt::Result<()> {
    let model = CostModel::default();
    let widths = [2, 4, 8, 14, 16, 24, 32, 48, 64];
    print!("{}", to_csv(&sweep_bitwidth(&model, ArrayDims::default(), 256, &widths, ArithConfig::default())?));
    println!();
    let orders: Vec<usize> = (2..=12).map(|k| 1 << k).collect();
    print!("{}", to_csv(&sweep_order(&model, ArrayDims::default(), 16, &orders, None, ArithConfig::default())?));
    Ok(())
}
