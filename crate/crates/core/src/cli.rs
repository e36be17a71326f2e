//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ArithConfig, Latency, ModmulShift};
use crate::bitcell::{replay, ArrayState, Subarray, TraceFile};
use crate::error::{Error, Result};
use crate::ntt::{bit_reverse_permute, ArrayDims, NttEngine, Polynomial};
use crate::oracle::{oracle_ntt, schoolbook};
use crate::perf::{self, CostModel, SimStats};
use crate::ring::{Convolution, RingParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "insram-ntt", version, about = "In-SRAM NTT simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a transform or polynomial product in the simulated array.
    Run(RunArgs),
    /// Sweep coefficient width or polynomial order and emit CSV.
    Sweep(SweepArgs),
    /// Re-execute a trace on the reference interpreter and check the final state.
    TraceReplay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// a·b via forward, pointwise, inverse.
    Polymul,
    /// Forward transform only.
    Forward,
    /// Forward then inverse.
    Roundtrip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Vary {
    Bitwidth,
    Order,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long, default_value_t = 256)]
    pub rows: usize,
    #[arg(long, default_value_t = 256)]
    pub cols: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent problems run side by side (one per tile group).
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    #[arg(long, value_enum, default_value_t = RunMode::Polymul)]
    pub mode: RunMode,
    #[arg(long)]
    pub cyclic: bool,
    /// JSON array (or array of arrays) of residues; replaces random `a`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub input_b: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
    /// Stop carry propagation early via zero tests.
    #[arg(long)]
    pub data_dependent: bool,
    /// Mask the multiplier's 1-bit shifts at tile boundaries.
    #[arg(long)]
    pub tile_scope_shifts: bool,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Final array state, for `trace-replay --expect`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Result polynomials as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: Vary,
    #[arg(long, default_value_t = 256)]
    pub order: usize,
    #[arg(long, default_value_t = 16)]
    pub width: usize,
    #[arg(long, default_value_t = 2)]
    pub min: usize,
    #[arg(long)]
    pub max: Option<usize>,
    #[arg(long, default_value_t = 256)]
    pub rows: usize,
    #[arg(long, default_value_t = 256)]
    pub cols: usize,
    #[arg(long)]
    pub coeff_rows: Option<usize>,
    #[arg(long)]
    pub data_dependent: bool,
    #[arg(long)]
    pub tile_scope_shifts: bool,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub trace: PathBuf,
    /// Starting state; all zeros when omitted.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// State file the replay must reproduce, in addition to the trace digest.
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

/// Fully resolved parameters of a `run`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub order: usize,
    pub q: u64,
    pub width: u32,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub batch: usize,
    pub mode: RunMode,
    pub convolution: Convolution,
    pub verify: bool,
    pub arith: ArithConfig,
    pub input: Option<PathBuf>,
    pub input_b: Option<PathBuf>,
    pub cost_model: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

fn arith_config(data_dependent: bool, tile_scope: bool) -> ArithConfig {
    ArithConfig {
        latency: if data_dependent { Latency::DataDependent } else { Latency::Deterministic },
        modmul_shift: if tile_scope { ModmulShift::Tile } else { ModmulShift::Global },
    }
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self> {
        let preset = match &a.preset {
            Some(name) => Some(
                crate::ring::PRESETS
                    .iter()
                    .find(|p| p.name == name)
                    .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?,
            ),
            None => None,
        };
        let order = a.order.or(preset.map(|p| p.order)).unwrap_or(256);
        let q = a.q.or(preset.map(|p| p.q)).unwrap_or(7681);
        let width = a.width.or(preset.map(|p| p.width)).unwrap_or(16);
        Ok(Self {
            preset: a.preset.clone(),
            order,
            q,
            width,
            rows: a.rows,
            cols: a.cols,
            seed: a.seed,
            batch: a.batch.max(1),
            mode: a.mode,
            convolution: if a.cyclic { Convolution::Cyclic } else { Convolution::Negacyclic },
            verify: a.verify,
            arith: arith_config(a.data_dependent, a.tile_scope_shifts),
            input: a.input.clone(),
            input_b: a.input_b.clone(),
            cost_model: a.cost_model.clone(),
            stats: a.stats.clone(),
            trace: a.trace.clone(),
            state: a.state.clone(),
            output: a.output.clone(),
        })
    }

    pub fn ring(&self) -> Result<RingParams> {
        Ok(RingParams::new(self.q, self.order, self.width)?.with_mode(self.convolution))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Reads `[c0, c1, ...]` or `[[...], [...]]`.
pub fn read_polynomials(path: &Path) -> Result<Vec<Polynomial>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let parse = |v: serde_json::Value| -> Result<Vec<Polynomial>> {
        serde_json::from_value(v).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    };
    match &value {
        serde_json::Value::Array(items) if items.first().is_some_and(|v| v.is_array()) => parse(value),
        _ => Ok(vec![serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?]),
    }
}

fn random_polys(rng: &mut ChaCha8Rng, count: usize, order: usize, q: u64) -> Vec<Polynomial> {
    (0..count).map(|_| (0..order).map(|_| rng.random_range(0..q)).collect()).collect()
}

fn check_inputs(polys: &[Polynomial], ring: &RingParams) -> Result<()> {
    for p in polys {
        if p.len() != ring.order {
            return Err(Error::LengthMismatch { left: p.len(), right: ring.order });
        }
        if let Some(&c) = p.iter().find(|&&c| c >= ring.q) {
            return Err(Error::Config(format!("coefficient {c} not reduced mod {}", ring.q)));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct StatsReport<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    stats: &'a SimStats,
    butterflies: usize,
    verified: Option<bool>,
}

pub struct RunOutcome {
    pub stats: SimStats,
    pub outputs: Vec<Polynomial>,
    pub verified: Option<bool>,
}

pub fn execute_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let ring = cfg.ring()?;
    let model = match &cfg.cost_model {
        Some(p) => CostModel::load(p)?,
        None => CostModel::default(),
    };
    let slots = if cfg.mode == RunMode::Polymul { 2 * ring.order } else { ring.order };
    let engine = NttEngine::new(&ring, ArrayDims::new(cfg.rows, cfg.cols), slots, cfg.arith)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = match &cfg.input {
        Some(p) => read_polynomials(p)?,
        None => random_polys(&mut rng, cfg.batch, ring.order, ring.q),
    };
    let b = match &cfg.input_b {
        Some(p) => read_polynomials(p)?,
        None => random_polys(&mut rng, a.len(), ring.order, ring.q),
    };
    check_inputs(&a, &ring)?;
    check_inputs(&b, &ring)?;
    if a.len() > engine.layout.parallel {
        return Err(Error::CapacityExceeded { needed: a.len() * slots, available: engine.layout.capacity() });
    }

    let mut arr = engine.subarray(cfg.trace.is_some())?;
    let report = match cfg.mode {
        RunMode::Polymul => {
            engine.load(&mut arr, &[&a, &b[..a.len()]])?;
            engine.polymul(&mut arr)?
        }
        RunMode::Forward => {
            engine.load(&mut arr, &[&a])?;
            engine.forward(&mut arr, 0)?
        }
        RunMode::Roundtrip => {
            engine.load(&mut arr, &[&a])?;
            let mut r = engine.forward(&mut arr, 0)?;
            let inv = engine.inverse(&mut arr, 0)?;
            r.butterflies += inv.butterflies;
            r
        }
    };
    let outputs = engine.read(&mut arr, 0, a.len())?;

    let verified = if cfg.verify {
        let mut ok = true;
        for (i, out) in outputs.iter().enumerate() {
            let want = match cfg.mode {
                RunMode::Polymul => schoolbook(&a[i], &b[i], ring.q, ring.mode)?,
                RunMode::Forward => bit_reverse_permute(&oracle_ntt(&a[i], &ring))?,
                RunMode::Roundtrip => a[i].clone(),
            };
            ok &= *out == want;
        }
        Some(ok)
    } else {
        None
    };

    let stats = SimStats::from_counts(arr.counts(), &model, engine.layout.parallel);
    if let Some(path) = &cfg.stats {
        let rep = StatsReport { config: cfg, stats: &stats, butterflies: report.butterflies, verified };
        write_file(path, &serde_json::to_string_pretty(&rep).expect("serializable"))?;
    }
    if let Some(path) = &cfg.output {
        write_file(path, &serde_json::to_string(&outputs).expect("serializable"))?;
    }
    let final_state = arr.snapshot();
    if let Some(path) = &cfg.state {
        write_file(path, &final_state.to_text())?;
    }
    if let Some(path) = &cfg.trace {
        let trace = TraceFile {
            rows: arr.rows(),
            cols: arr.cols(),
            ops: arr.take_trace(),
            final_digest: Some(final_state.digest()),
        };
        write_file(path, &trace.to_text())?;
    }
    Ok(RunOutcome { stats, outputs, verified })
}

pub fn cmd_run(args: &RunArgs) -> Result<i32> {
    let cfg = RunConfig::from_args(args)?;
    let outcome = execute_run(&cfg)?;
    let s = &outcome.stats;
    println!(
        "order={} q={} width={} parallel={} cycles={} latency_us={:.3} throughput_knnt_s={:.3} energy_nJ={:.3}{}",
        cfg.order,
        cfg.q,
        cfg.width,
        s.parallel,
        s.cycles,
        s.latency_us,
        s.throughput_knnt_s,
        s.energy_nj,
        match outcome.verified {
            Some(true) => " verify=ok",
            Some(false) => " verify=MISMATCH",
            None => "",
        }
    );
    Ok(if outcome.verified == Some(false) { EXIT_VERIFY } else { EXIT_OK })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let model = match &args.cost_model {
        Some(p) => CostModel::load(p)?,
        None => CostModel::default(),
    };
    let dims = ArrayDims::new(args.rows, args.cols);
    let config = arith_config(args.data_dependent, args.tile_scope_shifts);
    let run = || match args.vary {
        Vary::Bitwidth => {
            let widths: Vec<usize> = (args.min.max(2)..=args.max.unwrap_or(64).min(64)).collect();
            perf::sweep_bitwidth(&model, dims, args.order, &widths, config)
        }
        Vary::Order => {
            let lo = args.min.max(4).next_power_of_two();
            let hi = args.max.unwrap_or(4096);
            let orders: Vec<usize> = std::iter::successors(Some(lo), |&n| Some(n * 2)).take_while(|&n| n <= hi).collect();
            perf::sweep_order(&model, dims, args.width, &orders, args.coeff_rows, config)
        }
    };
    let points = match args.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let csv = perf::to_csv(&points);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

pub fn cmd_trace_replay(args: &ReplayArgs) -> Result<i32> {
    let trace = TraceFile::load(&args.trace)?;
    let initial = match &args.init {
        Some(p) => ArrayState::from_text(&std::fs::read_to_string(p).map_err(io_err(p))?)?,
        None => ArrayState::zeros(trace.rows, trace.cols),
    };
    if (initial.rows(), initial.cols()) != (trace.rows, trace.cols) {
        return Err(Error::Config(format!(
            "initial state is {}x{}, trace expects {}x{}",
            initial.rows(),
            initial.cols(),
            trace.rows,
            trace.cols
        )));
    }
    let last = replay(&initial, &trace.ops)?;
    // The fast model must agree with the interpreter too.
    let mut arr = Subarray::from_state(&initial)?;
    arr.set_tracing(false);
    for op in &trace.ops {
        arr.execute(op)?;
    }
    let mut problems = Vec::new();
    if arr.snapshot() != last {
        problems.push("simulator and interpreter disagree".to_string());
    }
    let digest = last.digest();
    if let Some(d) = &trace.final_digest {
        if *d != digest {
            problems.push(format!("digest {digest} != recorded {d}"));
        }
    }
    if let Some(p) = &args.expect {
        let want = ArrayState::from_text(&std::fs::read_to_string(p).map_err(io_err(p))?)?;
        if want != last {
            problems.push(format!("final state differs from {}", p.display()));
        }
    }
    if problems.is_empty() {
        println!("replayed {} ops: final state {digest} matches", trace.ops.len());
        Ok(EXIT_OK)
    } else {
        eprintln!("replay mismatch: {}", problems.join("; "));
        Ok(EXIT_VERIFY)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapacityExceeded { .. } => EXIT_CAPACITY,
        Error::Io { .. } => EXIT_IO,
        Error::ReplayDiverged { .. } => EXIT_VERIFY,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::TraceReplay(a) => cmd_trace_replay(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let cli = Cli::try_parse_from(["insram-ntt", "run", "--preset", "falcon", "--verify", "--cyclic"]).unwrap();
        let Command::Run(args) = cli.command else { panic!() };
        let cfg = RunConfig::from_args(&args).unwrap();
        assert_eq!((cfg.q, cfg.order, cfg.width), (12289, 1024, 16));
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_cli(["insram-ntt", "run", "--order", "256", "--q", "3329"]), EXIT_INVALID);
        assert_eq!(run_cli(["insram-ntt", "run", "--preset", "nope"]), EXIT_INVALID);
        assert_eq!(run_cli(["insram-ntt", "run", "--order", "8", "--q", "257", "--width", "10", "--rows", "9", "--cols", "20"]), EXIT_CAPACITY);
        assert_eq!(run_cli(["insram-ntt", "trace-replay", "/nonexistent/trace"]), EXIT_IO);
        assert_eq!(run_cli(["insram-ntt", "bogus"]), EXIT_INVALID);
    }
}
