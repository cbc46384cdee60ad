#![no_main]
use libfuzzer_sys::fuzz_target;
use succinct_dfs::engine::parse_window_override;
use succinct_dfs::{Fault, RootOrder};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok((level, size)) = parse_window_override(s) {
        assert!(level >= 1 && size >= 1);
    }
    if let Ok(f) = s.parse::<Fault>() {
        assert_eq!(f.to_string().parse::<Fault>().unwrap(), f);
    }
    let _ = s.parse::<RootOrder>();
});
