//! `--sweep NAME=v1,v2,...`: accepted sweeps have a name and finite values.
#![no_main]

use libfuzzer_sys::fuzz_target;
use uplink_access_cli::parse::parse_sweep;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sweep) = parse_sweep(text) {
        assert!(!sweep.name.is_empty());
        assert!(!sweep.values.is_empty());
        assert!(sweep.values.iter().all(|v| v.is_finite()));
    }
});
