//! Modular addition and subtraction by predication: a masked correction
//! replaces the per-tile branch.

use insram_ntt::arith::{bp_modadd, bp_modsub, MontgomeryContext};

fn main() -> insram_ntt::Result<()> {
    let ctx = MontgomeryContext::new(7681, 14)?;
    let u = [0, 1, 7680, 4000, 3840, 123];
    let t = [0, 7680, 7680, 4000, 3841, 456];
    let sum = bp_modadd(&ctx, &u, &t)?;
    let diff = bp_modsub(&ctx, &u, &t)?;
    for i in 0..u.len() {
        println!("{:>5} + {:>5} = {:>5}   {:>5} - {:>5} = {:>5}", u[i], t[i], sum[i], u[i], t[i], diff[i]);
    }

    // 12289 needs 14 bits, so a 14-bit word has no spare top bit.
    let tight = MontgomeryContext::new(12289, 14)?;
    println!("q = 12289 in 14 bits: {}", bp_modadd(&tight, &[1], &[2]).unwrap_err());
    Ok(())
}
