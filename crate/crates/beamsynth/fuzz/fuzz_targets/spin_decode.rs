//! Spin-block decoding: arbitrary byte blocks must either decode to a
//! finite on-grid value or return an error; unit-spin blocks always
//! decode.

#![no_main]

use beamsynth::encoding::{build_amp_code, build_phase_code, circular_distance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let bits = data[0] % 4 + 1;
    let amp_bits = usize::from(data[1] % 8 + 1);
    let payload = &data[2..];

    let code = build_phase_code(bits).expect("1..=4 bits build");
    let l = code.spins_per_antenna();
    // Raw bytes reinterpreted as spins: anything outside {-1, +1} must be
    // rejected with an error.
    let raw: Vec<i8> = payload.iter().take(l).map(|&b| b as i8).collect();
    let _ = code.decode(&raw);
    let _ = code.raw_weight(&raw);
    if payload.len() >= l {
        let block: Vec<i8> =
            payload[..l].iter().map(|&b| if b & 1 == 0 { 1 } else { -1 }).collect();
        let d = code.decode(&block).expect("unit blocks decode");
        assert!(d.phase.is_finite());
        assert!(
            code.allowed_grid().iter().any(|&g| circular_distance(d.phase, g) < 1e-9),
            "decoded phase off the grid"
        );
    }

    let amp = build_amp_code(amp_bits).expect("1..=8 amp bits build");
    let raw: Vec<i8> = payload.iter().take(amp_bits).map(|&b| b as i8).collect();
    let _ = amp.decode(&raw);
    if payload.len() >= amp_bits {
        let block: Vec<i8> =
            payload[..amp_bits].iter().map(|&b| if b & 1 == 0 { 1 } else { -1 }).collect();
        let beta = amp.decode(&block).expect("unit blocks decode");
        assert!((0.0..=1.0).contains(&beta));
    }
});
