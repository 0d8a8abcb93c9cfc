//! Configuration documents: arbitrary bytes must parse or be rejected,
//! never panic, and an accepted document must survive a sweep override.
#![no_main]

use libfuzzer_sys::fuzz_target;
use uplink_access_cli::parse::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_config(text) {
        let cfg = doc.config();
        assert!(cfg.cell_radius.is_finite() && cfg.gamma.is_finite());
        let _ = doc.with("R", cfg.femto_radius * 0.5);
        let _ = doc.with("rho_db", 3.0);
    }
});
