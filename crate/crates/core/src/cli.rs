//! `sdfs` command line: traverse, verify, bench, gen.
//!
//! Commands write to caller-supplied streams and return an exit code
//! (0 ok, 1 verification divergence, 2 bad input, 3 engine fault), so they
//! can be driven in-process by tests.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{parse_window_override, Engine, EngineConfig, EngineMode, Fault, LineSink, RootOrder};
use crate::error::{Error, Result};
use crate::gen::GenSpec;
use crate::graph::Graph;
use crate::levels::log_star;
use crate::oracle::classical_dfs;
use crate::stats::TraversalStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Mode {
    #[default]
    Succinct,
    Classical,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Path(PathBuf),
    Gen(GenSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub source: Source,
    pub root_order: RootOrder,
    pub seed: u64,
    pub mode: Mode,
    pub window_overrides: Vec<(usize, usize)>,
    pub test_sizing: bool,
    pub out: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn gen(spec: GenSpec) -> Self {
        RunConfig {
            source: Source::Gen(spec),
            root_order: RootOrder::Ascending,
            seed: 0,
            mode: Mode::Succinct,
            window_overrides: Vec::new(),
            test_sizing: false,
            out: None,
            stats: None,
            fault: None,
        }
    }

    pub fn load_graph(&self) -> Result<Graph> {
        match &self.source {
            Source::Path(p) => Graph::load(p),
            Source::Gen(spec) => spec.generate(self.seed),
        }
    }

    pub fn engine_config(&self, mode: EngineMode) -> EngineConfig {
        EngineConfig {
            seed: self.seed,
            mode,
            root_order: self.root_order,
            test_mode: self.test_sizing,
            window_overrides: self.window_overrides.clone(),
            fault: self.fault,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sdfs", version, about = "Depth-first search in O(n) bits of working memory")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Traverse a graph and stream its DFS tree edges.
    Traverse(RunArgs),
    /// Run the succinct engine and the classical oracle and compare their edge streams.
    Verify(RunArgs),
    /// Space and read-count scaling on random graphs.
    Bench(BenchArgs),
    /// Write a generated graph to a file.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Graph file (text edge list or binary).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generator spec: path:N, star:N, grid:R:C, gnm:N:M, tree:DEPTH.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Succinct)]
    mode: Mode,
    /// asc or desc.
    #[arg(long, default_value = "asc")]
    root_order: String,
    /// Pin the i-segment size of one level, as LEVEL:SIZE (repeatable).
    #[arg(long = "window-override")]
    window_override: Vec<String>,
    /// Nominal window sizes and no small-graph fallback.
    #[arg(long)]
    test_sizing: bool,
    /// Stats JSON destination.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Edge stream destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    fault: Option<String>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Vertex counts as powers of two.
    #[arg(long, value_delimiter = ',', default_values_t = [16u32, 17, 18, 19, 20])]
    log_sizes: Vec<u32>,
    /// Edges per vertex.
    #[arg(long, default_value_t = 4)]
    edge_factor: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Succinct)]
    mode: Mode,
    /// Rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    binary: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let source = match (self.input, self.gen) {
            (Some(p), _) => Source::Path(p),
            (None, Some(g)) => Source::Gen(g.parse()?),
            (None, None) => return Err(Error::bad_input(None, "one of --input or --gen is required")),
        };
        Ok(RunConfig {
            source,
            root_order: self.root_order.parse()?,
            seed: self.seed,
            mode: self.mode,
            window_overrides: self.window_override.iter().map(|s| parse_window_override(s)).collect::<Result<_>>()?,
            test_sizing: self.test_sizing,
            out: self.out,
            stats: self.stats,
            fault: self.fault.map(|f| f.parse()).transpose()?,
        })
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let parsed = match cli.cmd {
        Command::Traverse(a) => a.into_config().map(|c| cmd_traverse(&c, &mut out, &mut err)),
        Command::Verify(a) => a.into_config().map(|c| cmd_verify(&c, &mut out, &mut err)),
        Command::Bench(a) => {
            let cfg = BenchConfig {
                sizes: a.log_sizes.iter().map(|&k| 1usize << k).collect(),
                edge_factor: a.edge_factor,
                seed: a.seed,
                mode: a.mode,
            };
            Ok(cmd_bench(&cfg, a.json.as_deref(), &mut out, &mut err))
        }
        Command::Gen(a) => Ok(cmd_gen(&a.gen, a.seed, &a.out, a.binary, &mut err)),
    };
    parsed.unwrap_or_else(|e| report(&e, &mut err))
}

fn report(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "sdfs: {e}");
    e.exit_code()
}

fn write_stats(stats: &TraversalStats, path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, stats.to_json())?;
    }
    Ok(())
}

/// Traverses and writes the edge stream (and stats); `Mode::Verify` defers to [`cmd_verify`].
pub fn cmd_traverse(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if cfg.mode == Mode::Verify {
        return cmd_verify(cfg, out, err);
    }
    let mut run = || -> Result<TraversalStats> {
        let g = cfg.load_graph()?;
        let mode = if cfg.mode == Mode::Classical { EngineMode::Classical } else { EngineMode::Succinct };
        let engine = Engine::new(&g, cfg.engine_config(mode))?;
        let stats = match &cfg.out {
            Some(p) => {
                let mut sink = LineSink::new(BufWriter::new(File::create(p)?));
                let stats = engine.run(&mut sink)?;
                sink.finish()?;
                stats
            }
            None => {
                let mut sink = LineSink::new(BufWriter::new(&mut *out));
                let stats = engine.run(&mut sink)?;
                sink.finish()?;
                stats
            }
        };
        write_stats(&stats, &cfg.stats)?;
        Ok(stats)
    };
    match run() {
        Ok(_) => 0,
        Err(e) => report(&e, err),
    }
}

/// Exit 0 iff the succinct engine reproduces the classical edge stream.
pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut run = || -> Result<i32> {
        let g = cfg.load_graph()?;
        let mut got = Vec::new();
        let stats = Engine::new(&g, cfg.engine_config(EngineMode::Succinct))?.run(&mut |u, v| got.push((u, v)))?;
        write_stats(&stats, &cfg.stats)?;
        let want = classical_dfs(&g, cfg.root_order);
        match first_divergence(&got, &want) {
            None => {
                writeln!(out, "ok: {} tree edges identical", got.len())?;
                Ok(0)
            }
            Some(i) => {
                writeln!(
                    out,
                    "diverged at edge {i}: engine {:?}, oracle {:?} ({} vs {} edges)",
                    got.get(i),
                    want.get(i),
                    got.len(),
                    want.len()
                )?;
                Ok(1)
            }
        }
    };
    run().unwrap_or_else(|e| report(&e, err))
}

/// Index of the first differing edge, if the sequences differ.
pub fn first_divergence(a: &[(usize, usize)], b: &[(usize, usize)]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y).or((a.len() != b.len()).then(|| a.len().min(b.len())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub edge_factor: usize,
    pub seed: u64,
    pub mode: Mode,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub seconds: f64,
    pub peak_bits: u64,
    pub bits_per_vertex: f64,
    pub neighbor_reads: u64,
    pub reads_per_work: f64,
}

/// One row per size: `gnm(n, edge_factor * n)`.
pub fn bench_rows(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mode = if cfg.mode == Mode::Classical { EngineMode::Classical } else { EngineMode::Succinct };
    cfg.sizes
        .iter()
        .map(|&n| {
            let g = GenSpec::Gnm(n, cfg.edge_factor * n).generate(cfg.seed)?;
            let engine_cfg = EngineConfig { seed: cfg.seed, mode, ..Default::default() };
            let start = Instant::now();
            let stats = Engine::new(&g, engine_cfg)?.run(&mut |_, _| {})?;
            let seconds = start.elapsed().as_secs_f64();
            let work = g.m() as f64 + n as f64 * log_star(n.max(2) as u64) as f64;
            Ok(BenchRow {
                n,
                m: g.m(),
                seconds,
                peak_bits: stats.peak_bits,
                bits_per_vertex: stats.bits_per_vertex,
                neighbor_reads: stats.neighbor_reads,
                reads_per_work: stats.neighbor_reads as f64 / work,
            })
        })
        .collect()
}

pub fn cmd_bench(cfg: &BenchConfig, json: Option<&std::path::Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut run = || -> Result<()> {
        let rows = bench_rows(cfg)?;
        writeln!(
            out,
            "{:>9} {:>10} {:>9} {:>12} {:>8} {:>14} {:>8}",
            "n", "m", "seconds", "peak_bits", "bits/n", "neighbor_reads", "reads/w"
        )?;
        for r in &rows {
            writeln!(
                out,
                "{:>9} {:>10} {:>9.3} {:>12} {:>8.2} {:>14} {:>8.3}",
                r.n, r.m, r.seconds, r.peak_bits, r.bits_per_vertex, r.neighbor_reads, r.reads_per_work
            )?;
        }
        if let Some(p) = json {
            std::fs::write(p, serde_json::to_string_pretty(&rows).expect("rows serialize"))?;
        }
        Ok(())
    };
    run().map_or_else(|e| report(&e, err), |_| 0)
}

pub fn cmd_gen(spec: &str, seed: u64, out: &std::path::Path, binary: bool, err: &mut dyn Write) -> i32 {
    let run = || -> Result<()> {
        let g = spec.parse::<GenSpec>()?.generate(seed)?;
        if binary {
            g.save_binary(out)
        } else {
            g.save_text(out)
        }
    };
    run().map_or_else(|e| report(&e, err), |_| 0)
}
