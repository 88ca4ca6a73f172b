//! Fuzz the experiment-config JSON parser: arbitrary bytes must produce
//! either a parsed config or a structured error, never a panic.
//!
//! Run with:
//!   cargo +nightly fuzz run config_json

#![no_main]

use libfuzzer_sys::fuzz_target;
use torsionlab::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    // Configs are read as UTF-8 text; ignore byte strings that are not.
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json_str(text) {
        // A successfully validated config must re-validate after a
        // serialize/deserialize round trip.
        let json = serde_round_trip(&cfg);
        let again = ExperimentConfig::from_json_str(&json)
            .expect("serialized valid config must parse and validate");
        assert_eq!(cfg, again);
    }
});

fn serde_round_trip(cfg: &ExperimentConfig) -> String {
    serde_json::to_string(cfg).expect("valid config serializes")
}
