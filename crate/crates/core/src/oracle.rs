//! Ground truth: an unmetered classical DFS and a shadow of the full stack
//! that audits the hierarchy after every step.

use std::fmt;

use crate::engine::{Hierarchy, RootOrder, StepEvent, StepObserver};
use crate::error::Result;
use crate::graph::Graph;
use crate::levels::GroupKind;
use crate::meter::Color;

/// Iterative DFS with ascending neighbor order; tree edges in discovery order.
pub fn classical_dfs(g: &Graph, order: RootOrder) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut color = vec![Color::White; n + 1];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut edges = Vec::new();
    for u in order.roots(n) {
        if color[u] != Color::White {
            continue;
        }
        stack.push((u, 1));
        while let Some((v, next)) = stack.pop() {
            color[v] = Color::Gray;
            let deg = g.degree(v).expect("vertex in range");
            let found =
                (next..=deg).map(|k| (k, g.neighbor(v, k).expect("slot"))).find(|&(_, w)| color[w] == Color::White);
            match found {
                Some((k, w)) => {
                    edges.push((v, w));
                    stack.push((v, k + 1));
                    stack.push((w, 1));
                }
                None => color[v] = Color::Black,
            }
        }
    }
    edges
}

/// Connected components of the underlying undirected multigraph.
pub fn component_count(g: &Graph) -> usize {
    let n = g.n();
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub step: u64,
    pub level: usize,
    pub msg: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}, level {}: {}", self.step, self.level, self.msg)
    }
}

/// The imaginary stack, kept explicitly.
#[derive(Debug, Default)]
pub struct ShadowStack {
    pub stack: Vec<(usize, usize)>,
    pub log: Vec<StepEvent>,
    heavy_counts: Vec<usize>,
    seen_restorations: u64,
    pub steps_checked: u64,
    pub full_checks: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<Mismatch>,
    /// Compare whole windows at every step instead of only after rebuilds.
    pub always_full: bool,
}

impl ShadowStack {
    pub fn new() -> Self {
        Self::default()
    }

    fn apply(&mut self, h: &Hierarchy<'_>, ev: StepEvent) -> std::result::Result<(), String> {
        let levels = h.levels();
        if self.heavy_counts.len() <= levels.count() {
            self.heavy_counts = vec![0; levels.count() + 1];
        }
        let class = |v: usize| levels.heavy_class(h.graph().degree(v).expect("vertex"));
        match ev {
            StepEvent::Push { vertex, next } => {
                self.stack.push((vertex, next));
                if let Some(j) = class(vertex) {
                    self.heavy_counts[j] += 1;
                }
            }
            StepEvent::Pop { vertex, next } => {
                let top = self.stack.pop().ok_or("pop from an empty shadow stack")?;
                if top != (vertex, next) {
                    return Err(format!("popped ({vertex}, {next}), shadow top is {top:?}"));
                }
                if let Some(j) = class(vertex) {
                    self.heavy_counts[j] -= 1;
                }
            }
        }
        self.log.push(ev);
        Ok(())
    }

    /// Satellite the window of level `i >= 2` must hold for stack slot `p`.
    pub fn expected_entry(h: &Hierarchy<'_>, i: usize, p: usize, v: usize, next: usize) -> (u64, u64) {
        let levels = h.levels();
        let deg = h.graph().degree(v).expect("vertex");
        let seg = (p / levels.iseg_size(i - 1)) as u64;
        let grp = if levels.is_light(i, deg) && next > 1 {
            levels.group_of(GroupKind::Light(i), deg, next - 1).expect("slot") as u64
        } else {
            0
        };
        (seg, grp)
    }
}

/// Compares level `i` of `h` with the shadow; `full` checks every window slot.
pub fn shadow_check(
    h: &Hierarchy<'_>,
    shadow: &ShadowStack,
    i: usize,
    full: bool,
) -> std::result::Result<(), Mismatch> {
    let fail = |msg: String| Mismatch { step: h.step(), level: i, msg };
    let levels = h.levels();
    let stack = &shadow.stack;
    let d = stack.len();
    if h.depth(i) != d {
        return Err(fail(format!("depth {} but shadow height {d}", h.depth(i))));
    }
    let s = levels.iseg_size(i);
    let lo = h.window_lo(i);
    if !lo.is_multiple_of(s) || lo > d || d - lo > 2 * s || (d > 0 && lo == d) {
        return Err(fail(format!("window {lo}..{d} malformed for segment size {s}")));
    }
    if h.window_len(i) != d - lo {
        return Err(fail(format!("window holds {} entries, expected {}", h.window_len(i), d - lo)));
    }
    let first = if full { lo } else { d.saturating_sub(1).max(lo) };
    for (p, &(v, next)) in stack.iter().enumerate().take(d).skip(first) {
        if i == 1 {
            if h.ring_entry(p) != Some((v, next)) {
                return Err(fail(format!("slot {p}: S_1 has {:?}, shadow ({v}, {next})", h.ring_entry(p))));
            }
        } else {
            let want = ShadowStack::expected_entry(h, i, p, v, next);
            if h.window_entry(i, v) != Some(want) {
                return Err(fail(format!("slot {p} vertex {v}: stored {:?}, expected {want:?}", h.window_entry(i, v))));
            }
        }
    }
    let trailers = h.trailers(i);
    let expected_len = if d == 0 { 0 } else { 1 + d / s };
    if trailers.len() != expected_len {
        return Err(fail(format!("{} trailers, expected {expected_len}", trailers.len())));
    }
    let positions = |k: usize| if k == 0 { 0 } else { k * s - 1 };
    let ks: Vec<usize> =
        if full { (0..expected_len).collect() } else { expected_len.checked_sub(1).into_iter().collect() };
    for k in ks {
        if trailers[k] != stack[positions(k)] {
            return Err(fail(format!(
                "trailer {k} is {:?}, shadow slot {} is {:?}",
                trailers[k],
                positions(k),
                stack[positions(k)]
            )));
        }
    }
    if i >= 2 {
        if h.heavy_len(i) != shadow.heavy_counts.get(i).copied().unwrap_or(0) {
            return Err(fail(format!("H_{i} holds {}, expected {}", h.heavy_len(i), shadow.heavy_counts[i])));
        }
        if let Some(&(v, next)) = stack.last() {
            let deg = h.graph().degree(v).expect("vertex");
            if levels.heavy_class(deg) == Some(i) {
                let want = if next > 1 {
                    levels.group_of(GroupKind::Heavy(i), deg, next - 1).expect("slot") as u64
                } else {
                    0
                };
                if h.heavy_entry(i, v) != Some(want) {
                    return Err(fail(format!("H_{i} entry of {v} is {:?}, expected {want}", h.heavy_entry(i, v))));
                }
            }
        }
    }
    Ok(())
}

impl StepObserver for ShadowStack {
    fn on_step(&mut self, h: &Hierarchy<'_>, ev: StepEvent) -> Result<()> {
        let mut result = self.apply(h, ev).map_err(|msg| Mismatch { step: h.step(), level: 0, msg });
        if result.is_ok() {
            if let StepEvent::Push { vertex, next } = ev {
                let want = if next == 1 { Color::White } else { Color::Gray };
                if h.color(vertex) != want {
                    result = Err(Mismatch {
                        step: h.step(),
                        level: 0,
                        msg: format!("pushed {vertex} is {:?}", h.color(vertex)),
                    });
                }
            }
        }
        let full = self.always_full || h.restorations() != self.seen_restorations;
        self.seen_restorations = h.restorations();
        if full {
            self.full_checks += 1;
        }
        if result.is_ok() {
            result = (1..=h.levels().count()).try_for_each(|i| shadow_check(h, self, i, full));
        }
        self.steps_checked += 1;
        if let Err(m) = result {
            self.mismatches += 1;
            self.first_mismatch.get_or_insert(m);
        }
        Ok(())
    }
}
