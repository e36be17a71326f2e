//! Record every micro-op of a small product, then replay the trace on the
//! independent interpreter and compare final states.

use insram_ntt::bitcell::{replay, ArrayState, TraceFile};
use insram_ntt::ntt::{ArrayDims, NttEngine};
use insram_ntt::ring::RingParams;

fn main() -> insram_ntt::Result<()> {
    let ring = RingParams::new(257, 8, 10)?;
    let engine = NttEngine::new(&ring, ArrayDims::new(24, 40), 16, Default::default())?;
    let mut arr = engine.subarray(true)?;
    let start = ArrayState::zeros(arr.rows(), arr.cols());
    engine.load(&mut arr, &[&[vec![1, 2, 3, 4, 5, 6, 7, 8]], &[vec![0, 1, 0, 0, 0, 0, 0, 0]]])?;
    engine.polymul(&mut arr)?;
    println!("x * (1..8) = {:?}", engine.read(&mut arr, 0, 1)?[0]);

    let end = arr.snapshot();
    let trace = TraceFile { rows: arr.rows(), cols: arr.cols(), ops: arr.take_trace(), final_digest: Some(end.digest()) };
    let text = trace.to_text();
    println!("{} ops; head of trace:", trace.ops.len());
    text.lines().take(6).for_each(|l| println!("  {l}"));

    let parsed = TraceFile::parse(&text)?;
    let replayed = replay(&start, &parsed.ops)?;
    println!("replayed digest {}\nmatches: {}", replayed.digest(), replayed == end);
    Ok(())
}
