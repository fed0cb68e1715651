//! Competition scoring: quadratic-interpolated peak finding, -30 dB
//! mainlobe edge detection with dB-linear interpolation, the three
//! penalty terms, hard zero rules (pointing, timeout), and batch
//! averaging.
//!
//! All penalty terms are peak-relative power ratios in dB, so uniform
//! amplitude scaling never changes a score.

use serde::{Deserialize, Serialize};

use crate::array::{pattern, AngleGrid, Excitation, Pattern};
use crate::error::{Error, Result};

/// Pointing deviations beyond this zero the case score.
pub const POINTING_LIMIT_DEG: f64 = 1.0;
/// Per-case wall-clock budget; exceeding it zeroes the case score.
pub const TIME_LIMIT_SECONDS: f64 = 90.0;
/// Mainlobe edges sit where power first drops this far below the peak.
pub const EDGE_LEVEL_DB: f64 = -30.0;
/// Observation grid resolution used for scoring.
pub const SCORE_GRID_STEP_DEG: f64 = 0.05;

/// Why a case score was forced to zero, if it was.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroReason {
    Pointing,
    Timeout,
    None,
}

/// Full per-case scoring record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreBreakdown {
    /// Interpolated peak direction, degrees.
    pub theta_peak: f64,
    /// |theta_peak - theta0|, degrees.
    pub pointing_error: f64,
    /// Mainlobe beamwidth theta2 - theta1, degrees.
    #[serde(rename = "W")]
    pub w: f64,
    /// Far-sidelobe penalty max(0, 15 + S_far).
    pub penalty_a: f64,
    /// Beamwidth penalty max(0, W - 6).
    pub penalty_b: f64,
    /// Near-sidelobe penalty max(0, 30 + S_near).
    pub penalty_c: f64,
    /// Final score in [0, 1000].
    pub y: f64,
    pub zero_reason: ZeroReason,
}

/// Grid argmax refined by quadratic interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternPeak {
    /// Interpolated peak angle, degrees.
    pub theta_deg: f64,
    /// Peak power, taken from the grid maximum so that peak-relative
    /// ratios and exported patterns agree exactly.
    pub power: f64,
    /// Grid index of the maximum sample.
    pub index: usize,
}

/// Mainlobe edges at [`EDGE_LEVEL_DB`] below the peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainlobeEdges {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    /// True when no left crossing exists and theta1 fell back to the
    /// grid start.
    pub theta1_at_boundary: bool,
    /// True when no right crossing exists and theta2 fell back to the
    /// grid end.
    pub theta2_at_boundary: bool,
}

impl MainlobeEdges {
    pub fn width_deg(&self) -> f64 {
        self.theta2_deg - self.theta1_deg
    }
}

/// The standard scoring grid: [0, 180] at 0.05 degrees.
pub fn score_grid() -> AngleGrid {
    AngleGrid::new(0.0, 180.0, SCORE_GRID_STEP_DEG).expect("static grid bounds are valid")
}

/// Locates the pattern maximum, refining the angle with a quadratic fit
/// through the three samples around the grid argmax. Ties break toward
/// smaller angles; boundary maxima are not interpolated.
pub fn peak(pat: &Pattern) -> PatternPeak {
    let p = pat.values();
    let mut i = 0;
    for j in 1..p.len() {
        if p[j] > p[i] {
            i = j;
        }
    }
    let mut theta = pat.grid().samples()[i];
    if i > 0 && i + 1 < p.len() {
        let denom = p[i - 1] - 2.0 * p[i] + p[i + 1];
        if denom != 0.0 {
            let delta = (0.5 * (p[i - 1] - p[i + 1]) / denom).clamp(-0.5, 0.5);
            theta += delta * pat.grid().step_deg();
        }
    }
    PatternPeak { theta_deg: theta, power: p[i], index: i }
}

/// Finds the nearest crossing of the -30 dB-of-peak level on each side
/// of the peak, interpolating linearly in dB between the bracketing
/// samples. A side with no crossing returns the grid boundary, flagged.
pub fn mainlobe_edges(pat: &Pattern, pk: &PatternPeak) -> Result<MainlobeEdges> {
    if pk.power <= 0.0 {
        return Err(Error::Scoring("zero peak power".into()));
    }
    let thetas = pat.grid().samples();
    let step = pat.grid().step_deg();
    let level: Vec<f64> = pat.values().iter().map(|&p| 10.0 * (p / pk.power).log10()).collect();

    // Scanning outward from the peak keeps level[j] >= threshold until
    // the first drop, so each bracket is (below, above) by construction.
    let mut theta1 = thetas[0];
    let mut left_found = false;
    for j in (1..=pk.index).rev() {
        if level[j - 1] < EDGE_LEVEL_DB {
            let f = if level[j - 1].is_finite() {
                (level[j] - EDGE_LEVEL_DB) / (level[j] - level[j - 1])
            } else {
                0.0
            };
            theta1 = thetas[j] - f * step;
            left_found = true;
            break;
        }
    }
    let mut theta2 = *thetas.last().expect("grid is never empty");
    let mut right_found = false;
    for j in pk.index..level.len() - 1 {
        if level[j + 1] < EDGE_LEVEL_DB {
            let f = if level[j + 1].is_finite() {
                (level[j] - EDGE_LEVEL_DB) / (level[j] - level[j + 1])
            } else {
                0.0
            };
            theta2 = thetas[j] + f * step;
            right_found = true;
            break;
        }
    }
    Ok(MainlobeEdges {
        theta1_deg: theta1,
        theta2_deg: theta2,
        theta1_at_boundary: !left_found,
        theta2_at_boundary: !right_found,
    })
}

/// The three penalty terms:
/// a = max(0, 15 + S_far) over [0, theta0-30) and (theta0+30, 180],
/// b = max(0, W - 6) with W = theta2 - theta1,
/// c = max(0, 30 + S_near) over [theta0-30, theta1] and [theta2,
/// theta0+30], where S is the max sample level in dB relative to the
/// peak over the region (empty regions contribute nothing).
pub fn penalties(pat: &Pattern, theta0_deg: f64, edges: &MainlobeEdges) -> Result<(f64, f64, f64)> {
    let pk = peak(pat);
    if pk.power <= 0.0 {
        return Err(Error::Scoring("zero peak power".into()));
    }
    let lo = theta0_deg - 30.0;
    let hi = theta0_deg + 30.0;
    let mut far_max = f64::NEG_INFINITY;
    let mut near_max = f64::NEG_INFINITY;
    for (&t, &p) in pat.grid().samples().iter().zip(pat.values()) {
        if t < lo || t > hi {
            far_max = far_max.max(p);
        } else if t <= edges.theta1_deg || t >= edges.theta2_deg {
            near_max = near_max.max(p);
        }
    }
    let to_db = |p: f64| 10.0 * (p / pk.power).log10();
    let a = if far_max > 0.0 { (15.0 + to_db(far_max)).max(0.0) } else { 0.0 };
    let b = (edges.width_deg() - 6.0).max(0.0);
    let c = if near_max > 0.0 { (30.0 + to_db(near_max)).max(0.0) } else { 0.0 };
    Ok((a, b, c))
}

/// Scores one case: y = clamp(1000 - 100a - 80b - 20c, 0, 1000), forced
/// to zero when the peak misses theta0 by more than 1 degree (checked
/// first) or the case ran longer than 90 seconds.
pub fn case_score(pat: &Pattern, theta0_deg: f64, elapsed_seconds: f64) -> Result<ScoreBreakdown> {
    if !theta0_deg.is_finite() || !(0.0..=180.0).contains(&theta0_deg) {
        return Err(Error::Scoring(format!("theta0 {theta0_deg} outside [0, 180]")));
    }
    let pk = peak(pat);
    if pk.power <= 0.0 {
        return Err(Error::Scoring("zero peak power".into()));
    }
    let edges = mainlobe_edges(pat, &pk)?;
    let (a, b, c) = penalties(pat, theta0_deg, &edges)?;
    let pointing_error = (pk.theta_deg - theta0_deg).abs();
    let zero_reason = if pointing_error > POINTING_LIMIT_DEG {
        ZeroReason::Pointing
    } else if elapsed_seconds > TIME_LIMIT_SECONDS {
        ZeroReason::Timeout
    } else {
        ZeroReason::None
    };
    let y = match zero_reason {
        ZeroReason::None => (1000.0 - 100.0 * a - 80.0 * b - 20.0 * c).clamp(0.0, 1000.0),
        _ => 0.0,
    };
    Ok(ScoreBreakdown {
        theta_peak: pk.theta_deg,
        pointing_error,
        w: edges.width_deg(),
        penalty_a: a,
        penalty_b: b,
        penalty_c: c,
        y,
        zero_reason,
    })
}

/// Evaluates an excitation on the standard grid and scores it.
pub fn score_excitation(
    excitation: &Excitation,
    theta0_deg: f64,
    elapsed_seconds: f64,
) -> Result<ScoreBreakdown> {
    case_score(&pattern(excitation, &score_grid()), theta0_deg, elapsed_seconds)
}

/// Arithmetic mean of the per-case scores.
pub fn batch_score(breakdowns: &[ScoreBreakdown]) -> Result<f64> {
    if breakdowns.is_empty() {
        return Err(Error::Scoring("cannot average an empty batch".into()));
    }
    Ok(breakdowns.iter().map(|b| b.y).sum::<f64>() / breakdowns.len() as f64)
}
