//! File formats and disk IO: case lists and run configs in, per-case
//! result JSON, score summaries, and two-column pattern CSV out (and
//! back in for re-scoring).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array::{AngleGrid, Pattern};
use crate::cases::CaseSpec;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::pipeline::CaseResult;
use crate::scoring::{batch_score, ScoreBreakdown};

/// Header line of every pattern CSV.
pub const PATTERN_CSV_HEADER: &str = "theta_deg,power_db";

fn parse_context<T>(path: &Path, r: serde_json::Result<T>) -> Result<T> {
    r.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Prefixes parse errors with the offending path; other kinds (notably
/// case validation) pass through so their exit-code mapping survives.
fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Parses and validates a JSON array of case specs.
pub fn parse_cases(text: &str) -> Result<Vec<CaseSpec>> {
    let cases: Vec<CaseSpec> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for case in &cases {
        case.validate()?;
    }
    Ok(cases)
}

/// Reads and validates a JSON array of case specs.
pub fn read_cases(path: &Path) -> Result<Vec<CaseSpec>> {
    let text = fs::read_to_string(path)?;
    parse_cases(&text).map_err(|e| with_path(path, e))
}

pub fn write_cases(path: &Path, cases: &[CaseSpec]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(cases)
        .map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads and validates a TOML run config.
pub fn read_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    RunConfig::from_toml_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Result files are named by zero-padded case id for stable listings.
pub fn result_filename(case_id: u64) -> String {
    format!("case_{case_id:05}.json")
}

/// Writes one result into `dir` (created if missing); returns the path.
pub fn write_result(dir: &Path, result: &CaseResult) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(result_filename(result.case_id));
    let mut text = serde_json::to_string_pretty(result)
        .map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

pub fn read_result(path: &Path) -> Result<CaseResult> {
    let text = fs::read_to_string(path)?;
    parse_context(path, serde_json::from_str(&text))
}

/// Loads every `case_*.json` under `dir`, sorted by case id.
pub fn read_results_dir(dir: &Path) -> Result<Vec<CaseResult>> {
    let mut results = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("case_") && name.ends_with(".json") {
            results.push(read_result(&path)?);
        }
    }
    results.sort_by_key(|r| r.case_id);
    Ok(results)
}

/// Per-case entry of a score summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryCase {
    pub case_id: u64,
    pub breakdown: ScoreBreakdown,
}

/// Batch mean plus every case's breakdown, sorted by case id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub mean_score: f64,
    pub n_cases: usize,
    pub cases: Vec<SummaryCase>,
}

/// Builds a summary over loaded results.
pub fn build_summary(results: &[CaseResult]) -> Result<Summary> {
    let breakdowns: Vec<ScoreBreakdown> = results.iter().map(|r| r.breakdown.clone()).collect();
    let mean_score = batch_score(&breakdowns)?;
    let mut cases: Vec<SummaryCase> = results
        .iter()
        .map(|r| SummaryCase { case_id: r.case_id, breakdown: r.breakdown.clone() })
        .collect();
    cases.sort_by_key(|c| c.case_id);
    Ok(Summary { mean_score, n_cases: cases.len(), cases })
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path)?;
    parse_context(path, serde_json::from_str(&text))
}

/// Writes (theta_deg, power_db) rows under the standard header. Angles
/// carry four decimals (exact for 0.05-degree steps), levels six.
pub fn write_pattern_csv(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 24 + 24);
    text.push_str(PATTERN_CSV_HEADER);
    text.push('\n');
    for (theta, db) in rows {
        text.push_str(&format!("{theta:.4},{db:.6}\n"));
    }
    fs::write(path, text)?;
    Ok(())
}

/// Parses pattern CSV text: the standard header, then theta,level rows.
pub fn parse_pattern_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PATTERN_CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header '{PATTERN_CSV_HEADER}', got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (theta, db) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("row {} has no comma", i + 2)))?;
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {} {what}: {e}", i + 2)))
        };
        rows.push((parse(theta, "angle")?, parse(db, "level")?));
    }
    Ok(rows)
}

pub fn read_pattern_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    parse_pattern_csv(&text).map_err(|e| with_path(path, e))
}

/// Rebuilds a scoreable pattern from exported rows. The grid is
/// reconstructed from the row angles; peak power is 1 (0 dB).
pub fn pattern_from_rows(rows: &[(f64, f64)]) -> Result<Pattern> {
    if rows.len() < 2 {
        return Err(Error::Parse(format!("pattern needs at least 2 rows, got {}", rows.len())));
    }
    let start = rows[0].0;
    let end = rows[rows.len() - 1].0;
    let step = (end - start) / (rows.len() - 1) as f64;
    let grid = AngleGrid::new(start, end, step)?;
    if grid.len() != rows.len() {
        return Err(Error::Parse(format!(
            "row angles are not uniform: {} rows describe a {}-sample grid",
            rows.len(),
            grid.len()
        )));
    }
    for (&g, r) in grid.samples().iter().zip(rows) {
        if (g - r.0).abs() > 5e-4 {
            return Err(Error::Parse(format!("row angle {} deviates from the grid ({g})", r.0)));
        }
    }
    let power: Vec<f64> = rows.iter().map(|r| 10f64.powf(r.1 / 10.0)).collect();
    Pattern::new(grid, power)
}
