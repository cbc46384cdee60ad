#![no_main]
use libfuzzer_sys::fuzz_target;
use succinct_dfs::Graph;

fuzz_target!(|data: &[u8]| {
    // A header can legitimately ask for billions of vertices; keep memory bounded.
    let n = std::str::from_utf8(data).ok().and_then(|s| s.split_whitespace().next()?.parse::<u64>().ok());
    if n.is_some_and(|n| n > 1 << 16) {
        return;
    }
    if let Ok(g) = Graph::parse_text(data) {
        let mut text = Vec::new();
        g.write_text(&mut text).unwrap();
        let again = Graph::parse_text(&text[..]).expect("written text must parse");
        assert_eq!(again.offsets(), g.offsets());
        assert_eq!(again.targets(), g.targets());
        assert_eq!(again.is_directed(), g.is_directed());
    }
});
