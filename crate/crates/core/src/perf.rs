//! Cycle/energy accounting and parameter sweeps.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ArithConfig;
use crate::bitcell::{Backend, BitRow, Logic, MicroOp, OpCounter, OpCounts, ShiftDir, ShiftScope};
use crate::error::{Error, Result};
use crate::ntt::{layout_plan_with, ArrayDims, NttEngine};

/// Per-op costs. Energies are placeholders, not calibrated data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub cycles_write_row: f64,
    pub cycles_activate: f64,
    pub cycles_shift: f64,
    /// Extra cycles for masking at tile boundaries.
    pub cycles_tile_mask: f64,
    pub cycles_writeback: f64,
    pub cycles_zero_test: f64,
    pub cycles_host_read: f64,
    pub energy_write_row_pj: f64,
    pub energy_activate_pj: f64,
    pub energy_shift_pj: f64,
    pub energy_writeback_pj: f64,
    pub energy_zero_test_pj: f64,
    pub energy_host_read_pj: f64,
    pub frequency_mhz: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            cycles_write_row: 1.0,
            cycles_activate: 1.0,
            cycles_shift: 1.0,
            cycles_tile_mask: 1.0,
            cycles_writeback: 1.0,
            cycles_zero_test: 1.0,
            cycles_host_read: 1.0,
            energy_write_row_pj: 0.05,
            energy_activate_pj: 0.05,
            energy_shift_pj: 0.02,
            energy_writeback_pj: 0.05,
            energy_zero_test_pj: 0.01,
            energy_host_read_pj: 0.05,
            frequency_mhz: 3800.0,
        }
    }
}

impl CostModel {
    /// Parses flat `key = value` text; missing keys keep their defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let model: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_text(&text)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat struct serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let v = serde_json::to_value(self).expect("serializable");
        for (k, x) in v.as_object().expect("object") {
            let x = x.as_f64().unwrap_or(f64::NAN);
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::Config(format!("{k} must be a finite non-negative number")));
            }
        }
        if self.frequency_mhz == 0.0 {
            return Err(Error::Config("frequency_mhz must be positive".into()));
        }
        Ok(())
    }

    pub fn cycles(&self, c: &OpCounts) -> f64 {
        c.write_row as f64 * self.cycles_write_row
            + c.activations() as f64 * self.cycles_activate
            + c.shifts() as f64 * self.cycles_shift
            + c.shift_tile as f64 * self.cycles_tile_mask
            + c.writeback as f64 * self.cycles_writeback
            + c.zero_test as f64 * self.cycles_zero_test
            + c.host_read as f64 * self.cycles_host_read
    }

    pub fn energy_nj(&self, c: &OpCounts) -> f64 {
        let pj = c.write_row as f64 * self.energy_write_row_pj
            + c.activations() as f64 * self.energy_activate_pj
            + c.shifts() as f64 * self.energy_shift_pj
            + c.writeback as f64 * self.energy_writeback_pj
            + c.zero_test as f64 * self.energy_zero_test_pj
            + c.host_read as f64 * self.energy_host_read_pj;
        pj / 1000.0
    }

    /// Same model with every energy multiplied by `k`.
    pub fn scale_energy(&self, k: f64) -> Self {
        Self {
            energy_write_row_pj: self.energy_write_row_pj * k,
            energy_activate_pj: self.energy_activate_pj * k,
            energy_shift_pj: self.energy_shift_pj * k,
            energy_writeback_pj: self.energy_writeback_pj * k,
            energy_zero_test_pj: self.energy_zero_test_pj * k,
            energy_host_read_pj: self.energy_host_read_pj * k,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftClasses {
    pub global: u64,
    pub tile: u64,
    pub word_alignment: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub counts: OpCounts,
    pub cycles: f64,
    #[serde(rename = "energy_nJ")]
    pub energy_nj: f64,
    pub parallel: usize,
    pub latency_us: f64,
    pub throughput_knnt_s: f64,
    pub shifts: ShiftClasses,
}

impl SimStats {
    pub fn from_counts(counts: &OpCounts, model: &CostModel, parallel: usize) -> Self {
        let cycles = model.cycles(counts);
        let (latency_us, throughput_knnt_s) = if cycles > 0.0 {
            (cycles / model.frequency_mhz, parallel as f64 * model.frequency_mhz / cycles * 1e3)
        } else {
            (0.0, 0.0)
        };
        Self {
            counts: counts.clone(),
            cycles,
            energy_nj: model.energy_nj(counts),
            parallel,
            latency_us,
            throughput_knnt_s,
            shifts: ShiftClasses {
                global: counts.shift_global,
                tile: counts.shift_tile,
                word_alignment: counts.shift_align,
            },
        }
    }

    pub fn energy_per_ntt_nj(&self) -> f64 {
        if self.parallel == 0 {
            f64::INFINITY
        } else {
            self.energy_nj / self.parallel as f64
        }
    }
}

/// Tallies a trace and prices it.
pub fn accumulate(trace: &[MicroOp], model: &CostModel, parallel: usize) -> SimStats {
    let mut counts = OpCounts::default();
    trace.iter().for_each(|op| counts.record(op));
    SimStats::from_counts(&counts, model, parallel)
}

/// Counting backend that also notes activations reading a coefficient row.
#[derive(Debug, Default)]
pub struct AccessCounter {
    pub inner: OpCounter,
    pub coeff_rows: usize,
    pub coeff_reads: u64,
}

impl AccessCounter {
    pub fn new(coeff_rows: usize) -> Self {
        Self { inner: OpCounter::new(), coeff_rows, coeff_reads: 0 }
    }
}

impl Backend for AccessCounter {
    fn write_row(&mut self, row: usize, bits: &BitRow) -> Result<()> {
        self.inner.write_row(row, bits)
    }

    fn activate(&mut self, a: usize, b: usize, mode: Logic) -> Result<()> {
        self.coeff_reads += u64::from(a < self.coeff_rows || b < self.coeff_rows);
        self.inner.activate(a, b, mode)
    }

    fn shift(&mut self, dir: ShiftDir, scope: ShiftScope) -> Result<()> {
        self.inner.shift(dir, scope)
    }

    fn writeback(&mut self, row: usize) -> Result<()> {
        self.inner.writeback(row)
    }

    fn zero_test(&mut self) -> Result<bool> {
        self.inner.zero_test()
    }
}

/// Observed shifts over a bit-serial baseline that pays `width` alignment
/// shifts for every coefficient-row operand access on top of the same
/// arithmetic shifts.
pub fn shift_baseline_ratio(counts: &OpCounts, coeff_reads: u64, width: usize) -> f64 {
    let observed = counts.shifts() as f64;
    let baseline = observed + (width as u64 * coeff_reads) as f64;
    if baseline == 0.0 {
        0.0
    } else {
        observed / baseline
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: usize,
    pub cycles: f64,
    #[serde(rename = "energy_nJ")]
    pub energy_nj: f64,
    pub parallel: usize,
    pub latency_us: f64,
    pub throughput_knnt_s: f64,
    #[serde(rename = "energy_per_ntt_nJ")]
    pub energy_per_ntt_nj: f64,
    pub coeff_reads: u64,
    pub counts: OpCounts,
}

pub const CSV_HEADER: &str = "param,cycles,energy_nJ,parallel,latency_us,throughput_knnt_s,energy_per_ntt_nJ";

impl SweepPoint {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{},{:.6},{:.6},{}",
            self.param,
            self.cycles,
            self.energy_nj,
            self.parallel,
            self.latency_us,
            self.throughput_knnt_s,
            if self.energy_per_ntt_nj.is_finite() { format!("{:.6}", self.energy_per_ntt_nj) } else { "inf".into() }
        )
    }
}

pub fn to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

/// Twiddle with `ceil(w/2)` set bits, the expected weight of a random one.
pub fn typical_twiddle(width: usize) -> u64 {
    let all = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    0x5555_5555_5555_5555 & all
}

/// Op counts of one forward transform at `(width, order)`.
///
/// Points that do not fit `dims` are still counted, on a hypothetical array
/// just wide enough, and reported with `parallel = 0`.
pub fn measure_point(
    model: &CostModel,
    dims: ArrayDims,
    width: usize,
    order: usize,
    coeff_rows: Option<usize>,
    config: ArithConfig,
    param: usize,
) -> Result<SweepPoint> {
    let rows = coeff_rows.unwrap_or(dims.rows.saturating_sub(crate::ntt::SCRATCH_ROWS));
    let group = order.div_ceil(rows.max(1));
    let tiles = dims.cols / width;
    let parallel = if group <= tiles { tiles / group } else { 0 };
    let count_dims = ArrayDims::new(dims.rows, dims.cols.max(group * width));
    let layout = layout_plan_with(count_dims, width, order, order, coeff_rows)?;
    let engine = NttEngine::synthetic(layout, typical_twiddle(width), config)?;
    let mut counter = AccessCounter::new(engine.layout.coeff_rows);
    engine.forward(&mut counter, 0)?;
    let stats = SimStats::from_counts(&counter.inner.counts, model, parallel);
    Ok(SweepPoint {
        param,
        cycles: stats.cycles,
        energy_nj: stats.energy_nj,
        parallel,
        latency_us: stats.latency_us,
        throughput_knnt_s: stats.throughput_knnt_s,
        energy_per_ntt_nj: stats.energy_per_ntt_nj(),
        coeff_reads: counter.coeff_reads,
        counts: stats.counts,
    })
}

pub fn sweep_bitwidth(
    model: &CostModel,
    dims: ArrayDims,
    order: usize,
    widths: &[usize],
    config: ArithConfig,
) -> Result<Vec<SweepPoint>> {
    widths.par_iter().map(|&w| measure_point(model, dims, w, order, None, config, w)).collect()
}

pub fn sweep_order(
    model: &CostModel,
    dims: ArrayDims,
    width: usize,
    orders: &[usize],
    coeff_rows: Option<usize>,
    config: ArithConfig,
) -> Result<Vec<SweepPoint>> {
    orders.par_iter().map(|&n| measure_point(model, dims, width, n, coeff_rows, config, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcell::Logic;

    #[test]
    fn accumulate_basics() {
        let model = CostModel::default();
        assert_eq!(accumulate(&[], &model, 1).cycles, 0.0);
        let ops = vec![MicroOp::Activate { a: 0, b: 1, mode: Logic::And }; 10];
        assert_eq!(accumulate(&ops, &model, 1).cycles, 10.0);
        let tile = MicroOp::Shift { dir: ShiftDir::Left, scope: ShiftScope::Tile { width: 4, origin: 0 } };
        assert_eq!(accumulate(&[tile], &model, 1).cycles, 2.0);
    }

    #[test]
    fn config_text_round_trip() {
        let m = CostModel { cycles_activate: 2.5, ..Default::default() };
        assert_eq!(CostModel::from_text(&m.to_text()).unwrap(), m);
        let partial = CostModel::from_text("frequency_mhz = 1000\n").unwrap();
        assert_eq!(partial.frequency_mhz, 1000.0);
        assert_eq!(partial.cycles_activate, 1.0);
        assert!(CostModel::from_text("cycles_activate = -1").is_err());
        assert!(CostModel::from_text("bogus = 1").is_err());
    }

    #[test]
    fn ratio_edges() {
        assert_eq!(shift_baseline_ratio(&OpCounts::default(), 0, 16), 0.0);
        let c = OpCounts { shift_global: 10, ..Default::default() };
        assert_eq!(shift_baseline_ratio(&c, 0, 16), 1.0);
        assert_eq!(shift_baseline_ratio(&c, 10, 1), 0.5);
    }

    #[test]
    fn csv_shape() {
        let pts = sweep_order(&CostModel::default(), ArrayDims::default(), 16, &[4, 8], None, ArithConfig::default()).unwrap();
        let csv = to_csv(&pts);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
    }
}
