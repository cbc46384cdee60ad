#![no_main]
//! Differential: the succinct engine, audited by the shadow stack, against
//! the classical DFS on small graphs decoded from the input bytes.
use libfuzzer_sys::fuzz_target;
use succinct_dfs::oracle::{classical_dfs, ShadowStack};
use succinct_dfs::{Engine, EngineConfig, Graph, Levels, RootOrder};

fuzz_target!(|data: &[u8]| {
    let [a, b, c, rest @ ..] = data else { return };
    let n = 1 + (*a as usize | (*b as usize & 0x3) << 8);
    let directed = b & 0x4 != 0;
    let order = if b & 0x8 != 0 { RootOrder::Descending } else { RootOrder::Ascending };
    let edges: Vec<(usize, usize)> =
        rest.chunks_exact(2).map(|p| (1 + p[0] as usize % n, 1 + (p[1] as usize * 7 + p[0] as usize) % n)).collect();
    let g = Graph::build(n, &edges, directed).unwrap();

    let count = Levels::new(n, g.m(), false, &[]).unwrap().count();
    let mut s = 3 + (*c as usize % 6);
    let overrides: Vec<_> = (1..=count)
        .map(|i| {
            let o = (i, s);
            s = 4 * s + 4;
            o
        })
        .collect();
    let mut cfg = if c & 0x80 != 0 { EngineConfig::testing(&[]) } else { EngineConfig::testing(&overrides) };
    cfg.root_order = order;

    let mut got = Vec::new();
    let mut shadow = ShadowStack::new();
    let stats = Engine::new(&g, cfg).unwrap().run_observed(&mut |u, v| got.push((u, v)), &mut shadow).unwrap();
    assert_eq!(got, classical_dfs(&g, order));
    assert_eq!(shadow.mismatches, 0, "{:?}", shadow.first_mismatch);
    assert_eq!(stats.scan_violations, 0);
});
