//! Negacyclic product in Z_q[x]/(x^n + 1), computed inside the array,
//! against schoolbook multiplication.

use insram_ntt::ntt::{polymul_negacyclic, ArrayDims, NttEngine};
use insram_ntt::oracle::schoolbook_negacyclic;
use insram_ntt::perf::{CostModel, SimStats};
use insram_ntt::ring::RingParams;
use rand::{Rng, SeedableRng};

fn main() -> insram_ntt::Result<()> {
    let ring = RingParams::preset("ntt-256-16")?;
    let n = ring.order;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let a: Vec<u64> = (0..n).map(|_| rng.random_range(0..ring.q)).collect();
    let b: Vec<u64> = (0..n).map(|_| rng.random_range(0..ring.q)).collect();

    let c = polymul_negacyclic(&a, &b, &ring, ArrayDims::default())?;
    assert_eq!(c, schoolbook_negacyclic(&a, &b, ring.q)?);
    println!("a*b matches schoolbook; c[0..8] = {:?}", &c[..8]);

    // x * x^(n-1) = -1
    let mut x = vec![0; n];
    x[1] = 1;
    let mut xn1 = vec![0; n];
    xn1[n - 1] = 1;
    println!("x * x^{} -> c[0] = {} (= q - 1)", n - 1, polymul_negacyclic(&x, &xn1, &ring, ArrayDims::default())?[0]);

    let engine = NttEngine::new(&ring, ArrayDims::default(), 2 * n, Default::default())?;
    let mut arr = engine.subarray(false)?;
    engine.load(&mut arr, &[&[a], &[b]])?;
    engine.polymul(&mut arr)?;
    let stats = SimStats::from_counts(arr.counts(), &CostModel::default(), engine.layout.parallel);
    println!(
        "groups of {} tiles, {} in parallel: {} cycles, {:.1} us at {} MHz",
        engine.layout.group,
        engine.layout.parallel,
        stats.cycles,
        stats.latency_us,
        CostModel::default().frequency_mhz
    );
    Ok(())
}
