//! `--x-b x,y`: accepted points are finite.
#![no_main]

use libfuzzer_sys::fuzz_target;
use uplink_access_cli::parse::parse_point;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_point(text) {
        assert!(p.is_finite());
    }
});
