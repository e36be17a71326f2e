//! Tile layout, twiddle tables and in-array transforms.

mod engine;
mod layout;
mod twiddle;

pub use engine::{NttEngine, TransformReport};
pub use layout::{layout_plan, layout_plan_with, ArrayDims, TileLayout, PERIPHERY_ROWS, SCRATCH_ROWS};
pub use twiddle::{precompute_twiddles, raw_twiddle, TwiddleTable};

use crate::arith::ArithConfig;
use crate::bitcell::Backend;
use crate::error::{Error, Result};
use crate::ring::{bit_reverse, RingParams};

pub type Polynomial = Vec<u64>;

/// `out[i] = p[bitrev(i)]`.
pub fn bit_reverse_permute(p: &[u64]) -> Result<Polynomial> {
    if !p.len().is_power_of_two() {
        return Err(Error::InvalidRing(format!("length {} is not a power of two", p.len())));
    }
    let bits = p.len().trailing_zeros();
    Ok((0..p.len()).map(|i| p[bit_reverse(i, bits)]).collect())
}

fn engine_for(layout: &TileLayout, table: &TwiddleTable, ring: &RingParams) -> Result<NttEngine> {
    let engine = NttEngine::with_layout(ring, layout.clone(), ArithConfig::default())?;
    if engine.table != *table {
        return Err(Error::LayoutMismatch("twiddle table does not belong to this ring".into()));
    }
    Ok(engine)
}

/// Forward transform of the polynomials at slot 0 of every group.
pub fn ntt_forward<B: Backend + ?Sized>(
    be: &mut B,
    layout: &TileLayout,
    table: &TwiddleTable,
    ring: &RingParams,
) -> Result<TransformReport> {
    engine_for(layout, table, ring)?.forward(be, 0)
}

pub fn ntt_inverse<B: Backend + ?Sized>(
    be: &mut B,
    layout: &TileLayout,
    table: &TwiddleTable,
    ring: &RingParams,
) -> Result<TransformReport> {
    engine_for(layout, table, ring)?.inverse(be, 0)
}

/// Multiplies the spectrum at slot 0 by the one at slot `order`; the
/// latter is put into Montgomery form first.
pub fn pointwise_mul<B: Backend + ?Sized>(
    be: &mut B,
    layout: &TileLayout,
    table: &TwiddleTable,
    ring: &RingParams,
) -> Result<TransformReport> {
    let engine = engine_for(layout, table, ring)?;
    let mut report = engine.scale_all(be, ring.order, table.r2)?;
    let pw = engine.pointwise(be, 0, ring.order)?;
    report.modmuls += pw.modmuls;
    Ok(report)
}

/// Spectra (bit-reversed order) of up to `parallel` polynomials.
pub fn forward_batch(polys: &[Polynomial], ring: &RingParams, dims: ArrayDims, config: ArithConfig) -> Result<Vec<Polynomial>> {
    let engine = NttEngine::new(ring, dims, ring.order, config)?;
    let mut arr = engine.subarray(false)?;
    engine.load(&mut arr, &[polys])?;
    engine.forward(&mut arr, 0)?;
    engine.read(&mut arr, 0, polys.len())
}

/// Inverse of [`forward_batch`].
pub fn inverse_batch(spectra: &[Polynomial], ring: &RingParams, dims: ArrayDims, config: ArithConfig) -> Result<Vec<Polynomial>> {
    let engine = NttEngine::new(ring, dims, ring.order, config)?;
    let mut arr = engine.subarray(false)?;
    engine.load(&mut arr, &[spectra])?;
    engine.inverse(&mut arr, 0)?;
    engine.read(&mut arr, 0, spectra.len())
}

/// Products `a[g]·b[g]` in the ring, all groups at once.
pub fn polymul_batch(
    a: &[Polynomial],
    b: &[Polynomial],
    ring: &RingParams,
    dims: ArrayDims,
    config: ArithConfig,
) -> Result<Vec<Polynomial>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let engine = NttEngine::new(ring, dims, 2 * ring.order, config)?;
    let mut arr = engine.subarray(false)?;
    engine.load(&mut arr, &[a, b])?;
    engine.polymul(&mut arr)?;
    engine.read(&mut arr, 0, a.len())
}

/// `a·b` in `Z_q[x]/(x^order + 1)` computed entirely in the array.
pub fn polymul_negacyclic(a: &[u64], b: &[u64], ring: &RingParams, dims: ArrayDims) -> Result<Polynomial> {
    let out = polymul_batch(&[a.to_vec()], &[b.to_vec()], ring, dims, ArithConfig::default())?;
    Ok(out.into_iter().next().expect("one product"))
}
