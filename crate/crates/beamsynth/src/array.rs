//! Far-field radiation model of a uniform linear array.
//!
//! Element spacing is half a wavelength, so the inter-element phase term
//! at observation angle theta is pi * n * cos(theta) with n the 1-based
//! element index. Angles are degrees at every public boundary; radians
//! appear only inside formulas.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Geometry of the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    /// Number of antenna elements.
    pub n_antennas: usize,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self { n_antennas: 32 }
    }
}

impl ArrayConfig {
    pub fn new(n_antennas: usize) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::Config("n_antennas must be at least 1".into()));
        }
        Ok(Self { n_antennas })
    }
}

/// Per-element complex excitation, stored as separate phase and amplitude
/// sequences.
///
/// Phases are wrapped into `[0, 2*pi)` on construction; amplitudes must lie
/// in `[0, 1]`. Both invariants are re-enforced on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExcitationRaw", into = "ExcitationRaw")]
pub struct Excitation {
    phases: Vec<f64>,
    amplitudes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExcitationRaw {
    phases: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl From<Excitation> for ExcitationRaw {
    fn from(e: Excitation) -> Self {
        Self { phases: e.phases, amplitudes: e.amplitudes }
    }
}

impl TryFrom<ExcitationRaw> for Excitation {
    type Error = Error;
    fn try_from(raw: ExcitationRaw) -> Result<Self> {
        Excitation::new(raw.phases, raw.amplitudes)
    }
}

impl Excitation {
    /// Builds an excitation, wrapping phases into `[0, 2*pi)`.
    pub fn new(phases: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        if phases.len() != amplitudes.len() {
            return Err(Error::Shape(format!(
                "excitation has {} phases but {} amplitudes",
                phases.len(),
                amplitudes.len()
            )));
        }
        if phases.is_empty() {
            return Err(Error::Shape("excitation must have at least one element".into()));
        }
        let phases: Vec<f64> = phases
            .into_iter()
            .map(|p| {
                if p.is_finite() {
                    Ok(wrap_phase(p))
                } else {
                    Err(Error::Domain("excitation phase must be finite".into()))
                }
            })
            .collect::<Result<_>>()?;
        for &a in &amplitudes {
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return Err(Error::Domain(format!("amplitude {a} outside [0, 1]")));
            }
        }
        Ok(Self { phases, amplitudes })
    }

    /// Unit amplitudes, zero phases.
    pub fn uniform(n_antennas: usize) -> Result<Self> {
        Self::new(vec![0.0; n_antennas], vec![1.0; n_antennas])
    }

    /// Unit amplitudes with continuous steering phases `-pi*n*cos(theta0)`.
    pub fn steered(n_antennas: usize, theta0_deg: f64) -> Result<Self> {
        check_angle(theta0_deg)?;
        let c = theta0_deg.to_radians().cos();
        let phases = (0..n_antennas).map(|k| -PI * (k + 1) as f64 * c).collect();
        Self::new(phases, vec![1.0; n_antennas])
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }
}

/// Wraps an angle in radians into `[0, 2*pi)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if !theta_deg.is_finite() || !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::Domain(format!("angle {theta_deg} outside [0, 180] degrees")));
    }
    Ok(())
}

/// Element factor in dB: `-min(12*((theta-90)/90)^2, 30)`.
pub fn element_factor_db(theta_deg: f64) -> Result<f64> {
    check_angle(theta_deg)?;
    let t = (theta_deg - 90.0) / 90.0;
    Ok(-(12.0 * t * t).min(30.0))
}

/// Element factor on a linear scale: `10^(element_factor_db/10)`.
pub fn element_factor_power(theta_deg: f64) -> Result<f64> {
    Ok(10f64.powf(element_factor_db(theta_deg)? / 10.0))
}

/// Steering phasors `exp(i*pi*n*cos(theta))` for n = 1..=n_antennas.
pub fn steering_vector(theta_deg: f64, n_antennas: usize) -> Result<Vec<Complex64>> {
    check_angle(theta_deg)?;
    let c = theta_deg.to_radians().cos();
    Ok((0..n_antennas)
        .map(|k| Complex64::from_polar(1.0, PI * (k + 1) as f64 * c))
        .collect())
}

/// Complex field sum `F(theta)`, element factor not applied.
pub fn field_sum(excitation: &Excitation, theta_deg: f64) -> Result<Complex64> {
    check_angle(theta_deg)?;
    Ok(raw_field(excitation.phases(), excitation.amplitudes(), theta_deg))
}

/// Radiated power `E(theta) * |F(theta)|^2`.
pub fn power(excitation: &Excitation, theta_deg: f64) -> Result<f64> {
    let f = field_sum(excitation, theta_deg)?;
    Ok((element_factor_power(theta_deg)? * f.norm_sqr()).max(0.0))
}

/// `F(theta)` from raw phase/amplitude slices, angles unchecked.
///
/// Shared by the gradient branch, which evaluates mid-optimization phase
/// vectors that are not yet wrapped.
pub(crate) fn raw_field(phases: &[f64], amplitudes: &[f64], theta_deg: f64) -> Complex64 {
    debug_assert_eq!(phases.len(), amplitudes.len());
    let c = theta_deg.to_radians().cos();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, (&alpha, &beta)) in phases.iter().zip(amplitudes).enumerate() {
        sum += beta * Complex64::from_polar(1.0, alpha + PI * (k + 1) as f64 * c);
    }
    sum
}

/// `E(theta) * |F(theta)|^2` from raw slices, angles unchecked.
pub(crate) fn raw_power(phases: &[f64], amplitudes: &[f64], theta_deg: f64) -> f64 {
    let t = (theta_deg - 90.0) / 90.0;
    let e = 10f64.powf(-(12.0 * t * t).min(30.0) / 10.0);
    (e * raw_field(phases, amplitudes, theta_deg).norm_sqr()).max(0.0)
}

/// Uniformly spaced observation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    start_deg: f64,
    end_deg: f64,
    step_deg: f64,
    samples: Vec<f64>,
}

impl AngleGrid {
    /// Samples run from `start` in `step` increments; both endpoints are
    /// covered within one step.
    pub fn new(start_deg: f64, end_deg: f64, step_deg: f64) -> Result<Self> {
        check_angle(start_deg)?;
        check_angle(end_deg)?;
        if start_deg > end_deg {
            return Err(Error::Domain(format!(
                "grid start {start_deg} exceeds end {end_deg}"
            )));
        }
        if !step_deg.is_finite() || step_deg <= 0.0 {
            return Err(Error::Domain(format!("grid step {step_deg} must be positive")));
        }
        let span = end_deg - start_deg;
        // Tolerate rounding when the span is an exact multiple of the step.
        let n = ((span / step_deg) + 1e-9).floor() as usize;
        let samples = (0..=n)
            .map(|i| (start_deg + i as f64 * step_deg).min(end_deg))
            .collect();
        Ok(Self { start_deg, end_deg, step_deg, samples })
    }

    pub fn start_deg(&self) -> f64 {
        self.start_deg
    }

    pub fn end_deg(&self) -> f64 {
        self.end_deg
    }

    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// A power pattern sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    grid: AngleGrid,
    power: Vec<f64>,
}

impl Pattern {
    pub fn new(grid: AngleGrid, power: Vec<f64>) -> Result<Self> {
        if power.len() != grid.len() {
            return Err(Error::Shape(format!(
                "pattern has {} samples for a grid of {}",
                power.len(),
                grid.len()
            )));
        }
        for &p in &power {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Domain(format!("pattern power {p} must be finite and >= 0")));
            }
        }
        Ok(Self { grid, power })
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.power
    }
}

/// Evaluates the power pattern of an excitation over a grid.
pub fn pattern(excitation: &Excitation, grid: &AngleGrid) -> Pattern {
    let power: Vec<f64> = grid
        .samples()
        .iter()
        .map(|&t| raw_power(excitation.phases(), excitation.amplitudes(), t))
        .collect();
    Pattern { grid: grid.clone(), power }
}
