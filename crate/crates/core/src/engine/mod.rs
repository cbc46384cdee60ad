//! The traversal engine.
//!
//! [`Engine`] runs either the level hierarchy ([`Hierarchy`]) or a metered
//! classical stack DFS. Both emit tree edges in discovery order with neighbors
//! taken in ascending order, so their outputs are identical.
//!
//! The hierarchy keeps, for each level `i`, a window over the top of the stack
//! (`lo_i..depth`, at most two i-segments) plus a trailer stack holding the
//! bottom entry and every i-segment top. Level 1 stores `(vertex, next)`
//! pairs; higher levels store only each vertex's i-segment number below and a
//! coarse group of its next pointer, from which a window is rebuilt using the
//! level above.

mod classical;
mod level;
mod restore;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::dict::{EnumDict, SuccinctDict};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::levels::{log_star, GroupKind, HeavyClassTable, Levels};
use crate::meter::{bits_for, Charge, Color, ColorArray, SpaceMeter};
use crate::stats::TraversalStats;

use classical::Classical;
use level::{Level, Store};

/// Below this many vertices production runs use the classical DFS.
pub const FALLBACK_N: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineMode {
    #[default]
    Succinct,
    Classical,
}

/// Order in which roots of the DFS forest are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootOrder {
    #[default]
    Ascending,
    Descending,
}

impl RootOrder {
    pub fn roots(self, n: usize) -> Box<dyn Iterator<Item = usize>> {
        match self {
            RootOrder::Ascending => Box::new(1..=n),
            RootOrder::Descending => Box::new((1..=n).rev()),
        }
    }
}

impl FromStr for RootOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asc" | "ascending" => Ok(RootOrder::Ascending),
            "desc" | "descending" => Ok(RootOrder::Descending),
            _ => Err(Error::bad_input(None, format!("bad root order `{s}` (expected asc or desc)"))),
        }
    }
}

/// Deliberate corruption for testing the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Skip storing the `nth` (1-based) insert at `level`.
    SkipLevelInsert { level: usize, nth: u64 },
    /// Withhold the `nth` (1-based) tree edge from the sink.
    DropEdge { nth: u64 },
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::bad_input(None, format!("bad fault `{s}` (expected skip-insert:LEVEL:NTH or drop-edge:NTH)"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<u64>().ok().filter(|&x| x > 0).ok_or_else(bad);
        match parts.as_slice() {
            ["skip-insert", l, k] => Ok(Fault::SkipLevelInsert { level: num(l)? as usize, nth: num(k)? }),
            ["drop-edge", k] => Ok(Fault::DropEdge { nth: num(k)? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::SkipLevelInsert { level, nth } => write!(f, "skip-insert:{level}:{nth}"),
            Fault::DropEdge { nth } => write!(f, "drop-edge:{nth}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub seed: u64,
    pub mode: EngineMode,
    pub root_order: RootOrder,
    /// Disables the small-n fallback and keeps the top window at its nominal size.
    pub test_mode: bool,
    /// `(level, iseg_size)` pins.
    pub window_overrides: Vec<(usize, usize)>,
    pub fault: Option<Fault>,
}

impl EngineConfig {
    /// Test sizing with the given window pins.
    pub fn testing(overrides: &[(usize, usize)]) -> Self {
        EngineConfig { test_mode: true, window_overrides: overrides.to_vec(), ..Default::default() }
    }
}

/// Parses a `level:size` window pin.
pub fn parse_window_override(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::bad_input(None, format!("bad window override `{s}` (expected LEVEL:SIZE)"));
    let (l, k) = s.split_once(':').ok_or_else(bad)?;
    let level = l.trim().parse::<usize>().map_err(|_| bad())?;
    let size = k.trim().parse::<usize>().map_err(|_| bad())?;
    if level == 0 || size == 0 {
        return Err(bad());
    }
    Ok((level, size))
}

/// Consumer of tree edges.
pub trait EdgeSink {
    fn edge(&mut self, u: usize, v: usize);
}

impl<F: FnMut(usize, usize)> EdgeSink for F {
    fn edge(&mut self, u: usize, v: usize) {
        self(u, v)
    }
}

/// Writes `"u v\n"` lines, keeping the first I/O error.
pub struct LineSink<W: Write> {
    out: W,
    err: Option<std::io::Error>,
}

impl<W: Write> LineSink<W> {
    pub fn new(out: W) -> Self {
        LineSink { out, err: None }
    }

    pub fn finish(mut self) -> Result<W> {
        if let Some(e) = self.err.take() {
            return Err(e.into());
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> EdgeSink for LineSink<W> {
    fn edge(&mut self, u: usize, v: usize) {
        if self.err.is_none() {
            if let Err(e) = writeln!(self.out, "{u} {v}") {
                self.err = Some(e);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Push { vertex: usize, next: usize },
    Pop { vertex: usize, next: usize },
}

/// Called after every complete push or pop of the hierarchy.
pub trait StepObserver {
    fn on_step(&mut self, h: &Hierarchy<'_>, ev: StepEvent) -> Result<()>;
}

struct NoObserver;

impl StepObserver for NoObserver {
    fn on_step(&mut self, _: &Hierarchy<'_>, _: StepEvent) -> Result<()> {
        Ok(())
    }
}

enum Inner<'g> {
    Succinct(Box<Hierarchy<'g>>),
    Classical { run: Box<Classical<'g>>, fallback: bool },
}

pub struct Engine<'g> {
    g: &'g Graph,
    cfg: EngineConfig,
    meter: SpaceMeter,
    inner: Inner<'g>,
}

impl<'g> Engine<'g> {
    pub fn new(g: &'g Graph, cfg: EngineConfig) -> Result<Engine<'g>> {
        let meter = SpaceMeter::new();
        let fallback =
            cfg.mode == EngineMode::Succinct && !cfg.test_mode && cfg.window_overrides.is_empty() && g.n() < FALLBACK_N;
        let inner = if cfg.mode == EngineMode::Classical || fallback {
            Inner::Classical { run: Box::new(Classical::new(g, &meter, cfg.root_order)), fallback }
        } else {
            Inner::Succinct(Box::new(Hierarchy::new(g, &cfg, &meter)?))
        };
        Ok(Engine { g, cfg, meter, inner })
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    pub fn hierarchy(&self) -> Option<&Hierarchy<'g>> {
        match &self.inner {
            Inner::Succinct(h) => Some(h),
            Inner::Classical { .. } => None,
        }
    }

    pub fn run<S: EdgeSink>(self, sink: &mut S) -> Result<TraversalStats> {
        self.run_observed(sink, &mut NoObserver)
    }

    /// Runs to completion; `observer` only sees hierarchy runs.
    pub fn run_observed<S: EdgeSink>(
        mut self,
        sink: &mut S,
        observer: &mut dyn StepObserver,
    ) -> Result<TraversalStats> {
        let reads_before = self.g.reads();
        let mut emitted = 0u64;
        let drop_nth = match self.cfg.fault {
            Some(Fault::DropEdge { nth }) => nth,
            _ => 0,
        };
        let mut emit = |u: usize, v: usize| {
            emitted += 1;
            if emitted != drop_nth {
                sink.edge(u, v);
            }
        };
        let mut stats = TraversalStats {
            n: self.g.n(),
            m: self.g.m(),
            seed: self.cfg.seed,
            levels: log_star(self.g.n().max(2) as u64),
            ..Default::default()
        };
        match &mut self.inner {
            Inner::Succinct(h) => {
                h.run(&mut emit, observer)?;
                h.fill_stats(&mut stats);
                stats.mode = "succinct".into();
            }
            Inner::Classical { run, fallback } => {
                run.run(&mut emit)?;
                stats.steps = run.steps();
                stats.mode = if *fallback { "fallback" } else { "classical" }.into();
            }
        }
        stats.edges = emitted;
        stats.neighbor_reads = self.g.reads() - reads_before;
        stats.peak_bits = self.meter.peak_bits();
        stats.bits_per_vertex = stats.peak_bits as f64 / self.g.n().max(1) as f64;
        stats.meter = self.meter.per_label();
        Ok(stats)
    }
}

/// State of the level hierarchy; the read-only accessors are for checkers.
pub struct Hierarchy<'g> {
    g: &'g Graph,
    levels: Levels,
    seed: u64,
    root_order: RootOrder,
    fault: Option<Fault>,
    colors: ColorArray,
    table: HeavyClassTable,
    scratch: EnumDict,
    lv: Vec<Level>,
    /// `heavy[j]` is `H_j`, present for `j >= 2`.
    heavy: Vec<Option<SuccinctDict>>,
    root: usize,
    step: u64,
    max_scan: Vec<usize>,
    scan_violations: u64,
    _scalars: Charge,
}

impl<'g> Hierarchy<'g> {
    fn new(g: &'g Graph, cfg: &EngineConfig, meter: &SpaceMeter) -> Result<Hierarchy<'g>> {
        let n = g.n();
        let widen_top = !cfg.test_mode;
        let levels = Levels::new(n, g.m(), widen_top, &cfg.window_overrides)?;
        let count = levels.count();
        let max_deg = g.max_degree();
        let vertex_bits = bits_for(n as u64);
        let next_bits = bits_for(max_deg as u64 + 1);
        let colors = ColorArray::new(meter, n);
        let table = HeavyClassTable::new(meter, &levels);
        let scratch = EnumDict::new(meter, "scratch", n);
        let mut lv = Vec::with_capacity(count);
        for i in 1..=count {
            let p = levels.params(i);
            let sat = (i >= 2).then(|| {
                let below = levels.iseg_size(i - 1);
                let seg_bits = bits_for((n.max(1) as u64 - 1) / below as u64);
                let grp_bits = bits_for(levels.max_group(GroupKind::Light(i), max_deg));
                (seg_bits, grp_bits, cfg.seed.wrapping_add(i as u64))
            });
            lv.push(Level::new(meter, i, n, p.iseg_size, p.cap, p.low_water, vertex_bits, next_bits, sat));
        }
        // No more class-j vertices can be gray at once than the graph has.
        let mut class_count = vec![0usize; count + 1];
        for v in 1..=n {
            if let Some(j) = levels.heavy_class(g.degree_unchecked(v)) {
                class_count[j] += 1;
            }
        }
        let mut heavy = vec![None, None];
        for (j, &present) in class_count.iter().enumerate().skip(2) {
            let l = levels.ll(j - 1);
            let cap = (2 * (n as u64).div_ceil(l * l) as usize).min(present);
            let width = bits_for(levels.max_group(GroupKind::Heavy(j), max_deg));
            let seed = cfg.seed.wrapping_mul(31).wrapping_add(j as u64);
            heavy.push(Some(SuccinctDict::new(meter, &format!("H_{j}"), n, cap, width, seed)));
        }
        // Per-level depth, window bottom and trailer length, plus the loop scalars.
        let scalars = meter.charge("scalars", (3 * count as u64 + 8) * 64);
        Ok(Hierarchy {
            g,
            levels,
            seed: cfg.seed,
            root_order: cfg.root_order,
            fault: cfg.fault,
            colors,
            table,
            scratch,
            lv,
            heavy,
            root: 0,
            step: 0,
            max_scan: vec![0; count],
            scan_violations: 0,
            _scalars: scalars,
        })
    }

    fn violation(&self, level: usize, msg: impl Into<String>) -> Error {
        Error::InvariantViolation { level, step: self.step, msg: msg.into() }
    }

    fn run(&mut self, emit: &mut dyn FnMut(usize, usize), obs: &mut dyn StepObserver) -> Result<()> {
        let g = self.g;
        for u in self.root_order.roots(g.n()) {
            if self.colors.color(u) != Color::White {
                continue;
            }
            self.root = u;
            self.push(u, 1, obs)?;
            while self.lv[0].depth > 0 {
                let (v, next) = self.top()?;
                self.pop(v, next, obs)?;
                self.colors.paint(v, Color::Gray);
                let deg = g.degree_unchecked(v);
                let mut k = next;
                let mut child = None;
                while k <= deg {
                    let w = g.neighbor_unchecked(v, k);
                    if self.colors.color(w) == Color::White {
                        child = Some(w);
                        break;
                    }
                    k += 1;
                }
                match child {
                    Some(w) => {
                        emit(v, w);
                        self.push(v, k + 1, obs)?;
                        self.push(w, 1, obs)?;
                    }
                    None => self.colors.paint(v, Color::Black),
                }
            }
            for i in 1..=self.lv.len() {
                if self.lv[i - 1].depth != 0 || self.lv[i - 1].trailer_len() != 0 {
                    return Err(self.violation(i, "level not empty after its component finished"));
                }
            }
        }
        Ok(())
    }

    fn top(&self) -> Result<(usize, usize)> {
        let l1 = &self.lv[0];
        if l1.depth <= l1.lo {
            return Err(self.violation(1, "S_1 window empty while the stack is not"));
        }
        Ok(l1.ring_get(l1.depth - 1))
    }

    fn push(&mut self, v: usize, next: usize, obs: &mut dyn StepObserver) -> Result<()> {
        for i in (1..=self.lv.len()).rev() {
            self.level_insert(i, v, next)?;
        }
        self.step += 1;
        obs.on_step(self, StepEvent::Push { vertex: v, next })
    }

    fn pop(&mut self, v: usize, next: usize, obs: &mut dyn StepObserver) -> Result<()> {
        for i in (1..=self.lv.len()).rev() {
            self.level_delete(i, v)?;
        }
        self.step += 1;
        obs.on_step(self, StepEvent::Pop { vertex: v, next })
    }

    /// Satellite stored for `v` at stack position `p` in `S_i`, `i >= 2`.
    fn window_sat(&self, i: usize, p: usize, v: usize, next: usize) -> u64 {
        let deg = self.g.degree_unchecked(v);
        let seg = (p / self.levels.iseg_size(i - 1)) as u64;
        let light = self.table.classify(deg).is_none_or(|j| j > i);
        let grp = if light && next > 1 {
            (next - 1).div_ceil(self.levels.group_size(GroupKind::Light(i), deg)) as u64
        } else {
            0
        };
        self.lv[i - 1].pack(seg, grp)
    }

    fn heavy_sat(&self, j: usize, v: usize, next: usize) -> u64 {
        let deg = self.g.degree_unchecked(v);
        if next > 1 {
            (next - 1).div_ceil(self.levels.group_size(GroupKind::Heavy(j), deg)) as u64
        } else {
            0
        }
    }

    fn level_insert(&mut self, i: usize, v: usize, next: usize) -> Result<()> {
        let (s, lo, p) = {
            let l = &self.lv[i - 1];
            (l.s, l.lo, l.depth)
        };
        if p - lo == 2 * s {
            self.restore_full(i, v)?;
        }
        let l = &mut self.lv[i - 1];
        l.inserts += 1;
        let skip = matches!(self.fault, Some(Fault::SkipLevelInsert { level, nth }) if level == i && nth == l.inserts);
        if !skip {
            if matches!(l.store, Store::Ring { .. }) {
                self.lv[0].ring_put(p, v, next);
            } else {
                let sat = self.window_sat(i, p, v, next);
                self.lv[i - 1].dict_mut().expect("dict level").insert(v, sat)?;
            }
        }
        let l = &mut self.lv[i - 1];
        if l.is_trailer_pos(p) {
            l.trailer_push(i, v, next)?;
        }
        if i >= 2 && self.table.classify(self.g.degree_unchecked(v)) == Some(i) {
            let sat = self.heavy_sat(i, v, next);
            self.heavy[i].as_mut().expect("H_j").insert(v, sat)?;
        }
        self.lv[i - 1].depth += 1;
        Ok(())
    }

    fn level_delete(&mut self, i: usize, v: usize) -> Result<()> {
        let (lo, d, low) = {
            let l = &self.lv[i - 1];
            (l.lo, l.depth, l.low)
        };
        if d == 0 {
            return Err(Error::TrailerUnderflow { level: i });
        }
        if d - lo < low && lo > 0 {
            self.restore_empty(i, v)?;
        }
        if i >= 2 && self.table.classify(self.g.degree_unchecked(v)) == Some(i) {
            let step = self.step;
            self.heavy[i].as_mut().expect("H_j").delete(v).map_err(|_| Error::InvariantViolation {
                level: i,
                step,
                msg: format!("vertex {v} missing from H_{i}"),
            })?;
        }
        let p = d - 1;
        let step = self.step;
        let l = &mut self.lv[i - 1];
        if l.is_trailer_pos(p) {
            l.trailer_pop(i)?;
        }
        match &mut l.store {
            Store::Ring { .. } => {
                let (top, _) = l.ring_get(p);
                if top != v {
                    return Err(Error::InvariantViolation {
                        level: i,
                        step,
                        msg: format!("S_1 top is {top}, expected {v}"),
                    });
                }
            }
            Store::Dict(dict) => {
                dict.delete(v).map_err(|_| Error::InvariantViolation {
                    level: i,
                    step,
                    msg: format!("stack top {v} missing from S_{i}"),
                })?;
            }
        }
        l.depth -= 1;
        Ok(())
    }

    fn fill_stats(&self, stats: &mut TraversalStats) {
        stats.levels = self.lv.len();
        stats.iseg_sizes = self.lv.iter().map(|l| l.s).collect();
        stats.restore_full = self.lv.iter().map(|l| l.full_restores).collect();
        stats.restore_empty = self.lv.iter().map(|l| l.empty_restores).collect();
        stats.max_scan = self.max_scan.clone();
        stats.scan_violations = self.scan_violations;
        stats.steps = self.step;
        stats.dict_ops = self.lv.iter().filter_map(|l| l.dict()).map(|d| d.ops()).sum::<u64>()
            + self.heavy.iter().flatten().map(|d| d.ops()).sum::<u64>()
            + self.scratch.ops();
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn levels(&self) -> &Levels {
        &self.levels
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Completed pushes plus pops.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors.color(v)
    }

    pub fn depth(&self, i: usize) -> usize {
        self.lv[i - 1].depth
    }

    pub fn window_lo(&self, i: usize) -> usize {
        self.lv[i - 1].lo
    }

    /// Number of entries physically held by `S_i`.
    pub fn window_len(&self, i: usize) -> usize {
        let l = &self.lv[i - 1];
        l.dict().map_or(l.depth - l.lo, |d| d.len())
    }

    /// `(vertex, next)` stored in `S_1` for position `p`, if inside the window.
    pub fn ring_entry(&self, p: usize) -> Option<(usize, usize)> {
        let l = &self.lv[0];
        (l.lo..l.depth).contains(&p).then(|| l.ring_get(p))
    }

    /// `(seg, group)` stored for `v` in `S_i`, `i >= 2`.
    pub fn window_entry(&self, i: usize, v: usize) -> Option<(u64, u64)> {
        let l = &self.lv[i - 1];
        l.dict()?.lookup(v).map(|s| l.unpack(s))
    }

    pub fn trailers(&self, i: usize) -> Vec<(usize, usize)> {
        let l = &self.lv[i - 1];
        (0..l.trailer_len()).map(|k| l.trailer(i, k).expect("in range")).collect()
    }

    pub fn heavy_entry(&self, j: usize, v: usize) -> Option<u64> {
        self.heavy.get(j)?.as_ref()?.lookup(v)
    }

    pub fn heavy_len(&self, j: usize) -> usize {
        self.heavy.get(j).and_then(|h| h.as_ref()).map_or(0, |h| h.len())
    }

    /// Restorations performed so far, all levels and kinds.
    pub fn restorations(&self) -> u64 {
        self.lv.iter().map(|l| l.full_restores + l.empty_restores).sum()
    }
}
