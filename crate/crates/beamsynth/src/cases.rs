//! Seeded benchmark-case generation and the case record type.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One synthesis task: point the beam at `theta0` using phases from the
/// 2^bits grid, with amplitudes free only when `amp_opt` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub case_id: u64,
    /// Target direction in degrees, within [45, 134].
    pub theta0: f64,
    /// Phase quantization bits, in {1, 2, 3, 4}.
    pub bits: u8,
    /// Whether per-antenna amplitudes may differ from 1.
    pub amp_opt: bool,
    /// Per-case seed mixed into every stochastic stage.
    pub seed: u64,
}

impl CaseSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.theta0.is_finite() || !(45.0..=134.0).contains(&self.theta0) {
            return Err(Error::Case(format!(
                "case {}: theta0 {} outside [45, 134]",
                self.case_id, self.theta0
            )));
        }
        if !(1..=4).contains(&self.bits) {
            return Err(Error::Case(format!(
                "case {}: bits {} outside {{1, 2, 3, 4}}",
                self.case_id, self.bits
            )));
        }
        Ok(())
    }
}

/// Deterministically samples `n` cases: theta0 uniform in [45, 134],
/// bits uniform in {1..4}, amp_opt a fair coin, and an independent
/// per-case seed.
pub fn generate_cases(n: usize, seed: u64) -> Vec<CaseSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| CaseSpec {
            case_id: i as u64,
            theta0: rng.random_range(45.0..=134.0),
            bits: rng.random_range(1..=4u8),
            amp_opt: rng.random(),
            seed: rng.random(),
        })
        .collect()
}
