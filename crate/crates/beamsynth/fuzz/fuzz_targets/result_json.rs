//! Result JSON: parsed records round-trip exactly and their stored
//! excitation decodes without panicking.

#![no_main]

use beamsynth::pipeline::CaseResult;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(result) = serde_json::from_slice::<CaseResult>(data) else { return };
    let json = serde_json::to_string(&result).expect("parsed result serializes");
    let back: CaseResult = serde_json::from_str(&json).expect("round trip parses");
    assert_eq!(back, result);
    // Stored excitations may be malformed; rebuilding must error, not panic.
    let _ = result.excitation.to_excitation();
});
