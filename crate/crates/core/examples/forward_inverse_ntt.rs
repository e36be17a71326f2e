//! Forward and inverse transforms of several polynomials at once, one per
//! tile group, checked against the direct O(n^2) evaluation.

use insram_ntt::arith::ArithConfig;
use insram_ntt::ntt::{bit_reverse_permute, forward_batch, inverse_batch, ArrayDims};
use insram_ntt::oracle::oracle_ntt;
use insram_ntt::ring::RingParams;
use rand::{Rng, SeedableRng};

fn main() -> insram_ntt::Result<()> {
    let ring = RingParams::new(7681, 64, 14)?;
    println!("q = {}, order = {}, psi = {}, omega = {}", ring.q, ring.order, ring.psi, ring.omega);
    let dims = ArrayDims::new(70, 14 * 8);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let polys: Vec<Vec<u64>> = (0..8).map(|_| (0..64).map(|_| rng.random_range(0..ring.q)).collect()).collect();

    let spectra = forward_batch(&polys, &ring, dims, ArithConfig::default())?;
    for (p, s) in polys.iter().zip(&spectra) {
        assert_eq!(bit_reverse_permute(s)?, oracle_ntt(p, &ring));
    }
    println!("8 spectra match the oracle; first: {:?}...", &spectra[0][..6]);

    let back = inverse_batch(&spectra, &ring, dims, ArithConfig::default())?;
    assert_eq!(back, polys);
    println!("inverse restores all 8 inputs");
    Ok(())
}
