#![no_main]
use libfuzzer_sys::fuzz_target;
use succinct_dfs::gen::GenSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = s.parse::<GenSpec>() else { return };
    assert_eq!(spec.to_string().parse::<GenSpec>().unwrap(), spec);
    let small = match spec {
        GenSpec::Path(n) | GenSpec::Star(n) => n <= 10_000,
        GenSpec::Grid(r, c) => r.saturating_mul(c) <= 10_000,
        GenSpec::Gnm(n, m) => n <= 10_000 && m <= 40_000,
        GenSpec::Tree(d) => d <= 12,
    };
    if small {
        if let Ok(g) = spec.generate(7) {
            assert_eq!(g.m() % 2, 0, "generated graphs are undirected");
        }
    }
});
