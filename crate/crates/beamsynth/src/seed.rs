//! Deterministic seed derivation.

/// Mixes two 64-bit values through a splitmix64 round.
///
/// Used to derive per-case and per-stage RNG seeds from a master seed so
/// that no two pipeline stages ever share a generator stream.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
