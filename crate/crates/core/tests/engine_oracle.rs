use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use succinct_dfs::engine::{Fault, Hierarchy, StepEvent, StepObserver};
use succinct_dfs::gen::{self, GenSpec};
use succinct_dfs::levels::GroupKind;
use succinct_dfs::oracle::{classical_dfs, ShadowStack};
use succinct_dfs::{Engine, EngineConfig, EngineMode, Graph, RootOrder, TraversalStats};

type Edges = Vec<(usize, usize)>;

fn run(g: &Graph, cfg: EngineConfig) -> (Edges, TraversalStats) {
    let mut out = Vec::new();
    let st = Engine::new(g, cfg).unwrap().run(&mut |u, v| out.push((u, v))).unwrap();
    (out, st)
}

fn shadowed(g: &Graph, cfg: EngineConfig) -> (Edges, TraversalStats, ShadowStack) {
    let mut out = Vec::new();
    let mut shadow = ShadowStack::new();
    let st = Engine::new(g, cfg).unwrap().run_observed(&mut |u, v| out.push((u, v)), &mut shadow).unwrap();
    (out, st, shadow)
}

fn assert_exact(g: &Graph, cfg: EngineConfig, what: &str) -> TraversalStats {
    let order = cfg.root_order;
    let (got, st, shadow) = shadowed(g, cfg);
    assert_eq!(got, classical_dfs(g, order), "{what}: edge stream differs");
    assert_eq!(shadow.mismatches, 0, "{what}: {:?}", shadow.first_mismatch);
    assert_eq!(st.scan_violations, 0, "{what}");
    st
}

/// Smallest legal window chain starting from `s1`, one entry per level.
fn forced(g: &Graph, s1: usize) -> Vec<(usize, usize)> {
    let count = succinct_dfs::Levels::new(g.n(), g.m(), false, &[]).unwrap().count();
    let mut s = s1;
    (1..=count)
        .map(|i| {
            let here = (i, s);
            s = 4 * s + 4;
            here
        })
        .collect()
}

fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::build(n, edges, false).unwrap()
}

#[test]
fn small_examples() {
    let cfg = || EngineConfig::testing(&[]);
    assert_eq!(run(&gen::path(4).unwrap(), cfg()).0, vec![(1, 2), (2, 3), (3, 4)]);
    assert_eq!(run(&undirected(4, &[(1, 2), (3, 4)]), cfg()).0, vec![(1, 2), (3, 4)]);
    assert_eq!(run(&undirected(3, &[(1, 2), (2, 3), (1, 3)]), cfg()).0, vec![(1, 2), (2, 3)]);
    let (edges, st) = run(&undirected(1, &[]), cfg());
    assert!(edges.is_empty());
    assert_eq!(st.edges, 0);
}

#[derive(Default)]
struct Log {
    events: Vec<StepEvent>,
    first_trailers: Option<Vec<Vec<(usize, usize)>>>,
    emptied: Vec<bool>,
}

impl StepObserver for Log {
    fn on_step(&mut self, h: &Hierarchy<'_>, ev: StepEvent) -> succinct_dfs::Result<()> {
        let levels = h.levels().count();
        if self.first_trailers.is_none() {
            self.first_trailers = Some((1..=levels).map(|i| h.trailers(i)).collect());
        }
        if let StepEvent::Pop { .. } = ev {
            self.emptied
                .push((1..=levels).all(|i| h.depth(i) == 0 && h.trailers(i).is_empty() && h.window_len(i) == 0));
        }
        self.events.push(ev);
        Ok(())
    }
}

#[test]
fn star_recenters_and_seeds_trailers() {
    let g = gen::star(5).unwrap();
    let mut log = Log::default();
    let mut out = Vec::new();
    Engine::new(&g, EngineConfig::testing(&[])).unwrap().run_observed(&mut |u, v| out.push((u, v)), &mut log).unwrap();
    assert_eq!(out, vec![(1, 2), (1, 3), (1, 4), (1, 5)]);
    let repushes = log.events.iter().filter(|e| matches!(e, StepEvent::Push { vertex: 1, next } if *next > 1)).count();
    assert_eq!(repushes, 4);
    // The very first insert is the bottom of the stack at every level.
    for t in log.first_trailers.unwrap() {
        assert_eq!(t, vec![(1, 1)]);
    }
}

#[test]
fn deleting_the_seed_empties_every_level() {
    let g = undirected(3, &[]);
    let mut log = Log::default();
    Engine::new(&g, EngineConfig::testing(&[])).unwrap().run_observed(&mut |_, _| {}, &mut log).unwrap();
    assert_eq!(log.emptied, vec![true; 3]);
}

#[test]
fn every_vertex_discovered_once() {
    let g = gen::random_gnm(700, 2100, 9).unwrap();
    let mut log = Log::default();
    Engine::new(&g, EngineConfig::testing(&[(1, 4), (2, 24)])).unwrap().run_observed(&mut |_, _| {}, &mut log).unwrap();
    let mut seen = vec![0usize; g.n() + 1];
    for e in &log.events {
        if let StepEvent::Push { vertex, next: 1 } = *e {
            seen[vertex] += 1;
        }
    }
    assert!(seen[1..].iter().all(|&c| c == 1));
}

struct HeavyProbe {
    hits: usize,
    bad: Vec<String>,
}

impl StepObserver for HeavyProbe {
    fn on_step(&mut self, h: &Hierarchy<'_>, ev: StepEvent) -> succinct_dfs::Result<()> {
        if let StepEvent::Push { vertex: 1, next } = ev {
            if next == 10 {
                self.hits += 1;
                if h.heavy_entry(2, 1) != Some(9) {
                    self.bad.push(format!("H_2 holds {:?}", h.heavy_entry(2, 1)));
                }
            }
        }
        Ok(())
    }
}

#[test]
fn heavy_two_uses_unit_groups() {
    // n = 2^16 with 2^18 adjacency slots; vertex 1 has 2000 leaf neighbors.
    let n = 1 << 16;
    let mut edges: Vec<(usize, usize)> = (2..=2001).map(|w| (1, w)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    while edges.len() < (1 << 17) {
        let (a, b) = (rng.gen_range(2002..=n), rng.gen_range(2002..=n));
        if a != b {
            edges.push((a, b));
        }
    }
    let g = undirected(n, &edges);
    assert_eq!(g.m(), 1 << 18);
    let cfg = EngineConfig::testing(&[]);
    let levels = succinct_dfs::Levels::new(n, g.m(), false, &[]).unwrap();
    assert_eq!(levels.heavy_class(2000), Some(2));
    assert_eq!(levels.group_of(GroupKind::Heavy(2), 2000, 9).unwrap(), 9);
    let mut probe = HeavyProbe { hits: 0, bad: Vec::new() };
    Engine::new(&g, cfg).unwrap().run_observed(&mut |_, _| {}, &mut probe).unwrap();
    assert_eq!(probe.hits, 1);
    assert!(probe.bad.is_empty(), "{:?}", probe.bad);
}

#[test]
fn named_shapes_match_oracle() {
    let shapes = [
        GenSpec::Tree(12),
        GenSpec::Path(64),
        GenSpec::Path(256),
        GenSpec::Path(10_000),
        GenSpec::Star(3000),
        GenSpec::Grid(40, 60),
        GenSpec::Gnm(256, 1024),
    ];
    for spec in shapes {
        let g = spec.generate(1).unwrap();
        assert_exact(&g, EngineConfig::testing(&[]), &format!("{spec:?} test sizing"));
        assert_exact(&g, EngineConfig::testing(&forced(&g, 4)), &format!("{spec:?} tiny windows"));
        let (got, _) = run(&g, EngineConfig::default());
        assert_eq!(got, classical_dfs(&g, RootOrder::Ascending), "{spec:?} production");
    }
}

#[test]
fn restore_counts_stay_within_segment_bound() {
    let g = gen::path(10_000).unwrap();
    let st = assert_exact(&g, EngineConfig::testing(&[(1, 16), (2, 80)]), "path");
    for (i, (&f, &e)) in st.restore_full.iter().zip(&st.restore_empty).enumerate() {
        let bound = 4 * g.n().div_ceil(st.iseg_sizes[i]) as u64;
        assert!(f <= bound && e <= bound, "level {}: {f}/{e} > {bound}", i + 1);
    }
    assert!(st.restore_full[0] > 0 && st.restore_full[1] > 0);
}

/// Many paths hanging off one hub: the stack repeatedly climbs and falls.
fn star_of_paths(arms: usize, len: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..arms {
        let base = 2 + a * len;
        edges.push((1, base));
        for k in 0..len - 1 {
            edges.push((base + k, base + k + 1));
        }
    }
    undirected(1 + arms * len, &edges)
}

#[test]
fn star_of_paths_restores_exactly() {
    let g = star_of_paths(30, 37);
    for ov in [vec![(1, 3), (2, 16)], vec![(1, 5), (2, 24), (3, 100)], vec![]] {
        let st = assert_exact(&g, EngineConfig::testing(&ov), &format!("star_of_paths {ov:?}"));
        if !ov.is_empty() {
            assert!(st.restore_empty[0] > 0);
        }
    }
}

#[test]
fn random_graphs_with_forced_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for t in 0..60u64 {
        let n = rng.gen_range(2..=1500usize);
        let m = rng.gen_range(0..=(4 * n).min(n * (n - 1) / 2));
        let g = gen::random_gnm(n, m, t).unwrap();
        let s1 = [3, 4, 8][t as usize % 3];
        let order = if t % 2 == 0 { RootOrder::Ascending } else { RootOrder::Descending };
        let mut cfg = EngineConfig::testing(&forced(&g, s1));
        cfg.root_order = order;
        assert_exact(&g, cfg, &format!("gnm({n},{m}) #{t}"));
    }
}

#[test]
fn dense_graphs_exercise_wide_groups() {
    let g = gen::random_gnm(400, 60_000, 2).unwrap();
    let st = assert_exact(&g, EngineConfig::testing(&[(1, 3), (2, 16)]), "dense");
    assert!(st.max_scan.iter().any(|&s| s > 1), "{:?}", st.max_scan);
}

#[test]
fn directed_and_multigraph_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..30 {
        let n = rng.gen_range(1..=400usize);
        let edges: Vec<_> = (0..3 * n).map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n))).collect();
        for directed in [true, false] {
            let g = Graph::build(n, &edges, directed).unwrap();
            assert_exact(&g, EngineConfig::testing(&[]), &format!("#{t} directed={directed}"));
            if n > 20 {
                assert_exact(&g, EngineConfig::testing(&[(1, 3)]), &format!("#{t} directed={directed} tiny"));
            }
        }
    }
}

#[test]
fn descending_roots() {
    let g = undirected(6, &[(1, 2), (3, 4), (5, 6), (2, 5)]);
    let mut cfg = EngineConfig::testing(&[]);
    cfg.root_order = RootOrder::Descending;
    assert_eq!(run(&g, cfg).0, vec![(6, 5), (5, 2), (2, 1), (4, 3)]);
    assert_eq!(classical_dfs(&g, RootOrder::Descending), vec![(6, 5), (5, 2), (2, 1), (4, 3)]);
}

#[test]
fn modes_are_reported() {
    let small = gen::random_gnm(500, 2000, 1).unwrap();
    assert_eq!(run(&small, EngineConfig::default()).1.mode, "fallback");
    assert_eq!(run(&small, EngineConfig::testing(&[])).1.mode, "succinct");
    let classical = EngineConfig { mode: EngineMode::Classical, ..EngineConfig::default() };
    let (edges, st) = run(&small, classical);
    assert_eq!(st.mode, "classical");
    assert_eq!(edges, classical_dfs(&small, RootOrder::Ascending));
    let big = gen::random_gnm(5000, 20_000, 1).unwrap();
    let (edges, st) = run(&big, EngineConfig::default());
    assert_eq!(st.mode, "succinct");
    assert_eq!(edges, classical_dfs(&big, RootOrder::Ascending));
}

#[test]
fn stats_are_consistent() {
    let g = gen::random_gnm(3000, 9000, 5).unwrap();
    let (edges, st) = run(&g, EngineConfig::testing(&[(1, 8)]));
    assert_eq!(st.edges as usize, edges.len());
    assert_eq!(edges.len(), g.n() - succinct_dfs::oracle::component_count(&g));
    assert_eq!(st.levels, st.iseg_sizes.len());
    assert_eq!(st.meter.values().sum::<u64>(), st.peak_bits);
    assert!(st.neighbor_reads >= g.m() as u64);
    let back = TraversalStats::from_json(&st.to_json()).unwrap();
    assert_eq!(back, st);
}

#[test]
fn same_seed_same_everything() {
    let g = gen::random_gnm(2500, 10_000, 8).unwrap();
    let a = run(&g, EngineConfig::testing(&[(1, 4)]));
    let b = run(&g, EngineConfig::testing(&[(1, 4)]));
    assert_eq!(a.0, b.0);
    assert_eq!(a.1.to_json(), b.1.to_json());
}

#[test]
fn skipped_insert_is_caught_by_shadow() {
    let g = gen::path(200).unwrap();
    let mut cfg = EngineConfig::testing(&[(1, 4), (2, 20)]);
    cfg.fault = Some(Fault::SkipLevelInsert { level: 2, nth: 30 });
    let mut shadow = ShadowStack::new();
    let res = Engine::new(&g, cfg).unwrap().run_observed(&mut |_, _| {}, &mut shadow);
    assert!(res.is_err() || shadow.mismatches > 0);
}

#[test]
fn dropped_edge_changes_output() {
    let g = gen::random_gnm(300, 900, 1).unwrap();
    let mut cfg = EngineConfig::testing(&[]);
    cfg.fault = Some(Fault::DropEdge { nth: 5 });
    let (got, _) = run(&g, cfg);
    assert_ne!(got, classical_dfs(&g, RootOrder::Ascending));
}

#[test]
fn bad_overrides_are_rejected() {
    let g = gen::path(100).unwrap();
    for ov in [vec![(1, 0)], vec![(1, 10), (2, 12)], vec![(9, 4)]] {
        assert!(Engine::new(&g, EngineConfig::testing(&ov)).is_err(), "{ov:?}");
    }
}
