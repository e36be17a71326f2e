//! Montgomery product A=4, B=3, M=7 with 3-bit words, step by step.
//!
//! Iterations where A's bit is 0 skip the add-B block (steps 1-3), so the
//! op stream itself encodes the multiplier.

use insram_ntt::arith::trace_modmul_steps;

fn main() -> insram_ntt::Result<()> {
    let (states, p) = trace_modmul_steps(4, 3, 7, 3)?;
    println!("iter step  Sum  Carry  c1   s1   c2   m");
    for s in &states {
        println!(
            "{:>4} {:>4}  {:03b}  {:03b}    {:03b}  {:03b}  {:03b}  {:03b}",
            s.mark.iteration + 1,
            s.mark.step,
            s.sum,
            s.carry,
            s.c1,
            s.s1,
            s.c2,
            s.m
        );
    }
    let last = states.last().unwrap();
    println!("P = {:03b} + {:03b} << 1 = {p}", last.sum, last.carry);
    Ok(())
}
