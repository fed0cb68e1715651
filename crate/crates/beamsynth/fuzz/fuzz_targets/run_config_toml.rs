//! Run-config TOML: accepted configs are validated, re-encode to TOML
//! that parses back to the same value, and fingerprint cleanly.

#![no_main]

use beamsynth::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = RunConfig::from_toml_str(text) else { return };
    let toml = config.to_toml_string().expect("valid config re-encodes");
    let back = RunConfig::from_toml_str(&toml).expect("re-encoded config parses");
    assert_eq!(back, config);
    assert_eq!(config.fingerprint().len(), 64);
});
