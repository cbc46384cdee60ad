#![no_main]
use libfuzzer_sys::fuzz_target;
use succinct_dfs::Graph;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = Graph::decode_binary(data) {
        assert_eq!(g.encode_binary(), data);
        for v in 1..=g.n() {
            let deg = g.degree(v).unwrap();
            for k in 1..=deg {
                let w = g.neighbor(v, k).unwrap();
                assert!((1..=g.n()).contains(&w));
            }
            assert!(g.neighbor(v, deg + 1).is_err());
        }
    }
});
