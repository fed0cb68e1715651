//! Pattern CSV: the row parser and the grid rebuilder must reject bad
//! input with errors, never panics or runaway allocations.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = beamsynth::io::parse_pattern_csv(text) else { return };
    if let Ok(pattern) = beamsynth::io::pattern_from_rows(&rows) {
        // A rebuilt pattern is scoreable end to end.
        let _ = beamsynth::scoring::case_score(&pattern, 90.0, 1.0);
    }
});
