//! Fuzz the profile-table CSV parser and the manifold built from its
//! output: malformed tables must be rejected with errors, and any table
//! that passes both parsers must support the basic volume queries without
//! panicking.
//!
//! Run with:
//!   cargo +nightly fuzz run profile_csv

#![no_main]

use libfuzzer_sys::fuzz_target;
use torsionlab::config::parse_profile_csv;
use torsionlab::RevolutionManifold;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = parse_profile_csv(text) else {
        return;
    };
    let Ok(manifold) = RevolutionManifold::from_table(2, &table) else {
        return;
    };
    // A constructed manifold must answer volume queries.
    let r = manifold.t_max() * 0.5;
    if let Ok(v) = manifold.ball_volume(r) {
        assert!(v >= 0.0);
        if v > 0.0 {
            if let Ok(back) = manifold.radius_for_volume(v) {
                assert!((0.0..=manifold.t_max()).contains(&back));
            }
        }
    }
});
