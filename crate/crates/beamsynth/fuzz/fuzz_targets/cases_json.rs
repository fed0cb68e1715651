//! Case-list JSON: anything the parser accepts must validate and survive
//! a serialize/parse round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cases) = beamsynth::io::parse_cases(text) else { return };
    let json = serde_json::to_string(&cases).expect("accepted cases serialize");
    let back = beamsynth::io::parse_cases(&json).expect("round trip parses");
    assert_eq!(back, cases);
});
