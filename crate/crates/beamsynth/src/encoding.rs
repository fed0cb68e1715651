//! Spin-to-excitation encodings.
//!
//! Phases: an antenna with b quantization bits draws from the grid
//! {2*pi*k / 2^b}. A half-sized Gray walk fixes 2^(b-1) reference states;
//! complex weights on the odd-cardinality spin products interpolate every
//! grid phase from those states, so one antenna costs L = 2^(b-1) spins
//! instead of 2^b. The L coefficient slots are treated as free spins by
//! the solvers; decoding projects by arg() plus a grid snap, which is
//! exact whenever the block is consistent (always for b <= 2).
//!
//! Amplitudes: one spin per amplitude bit with geometric weights
//! 2^-(k+2), giving the uniform ladder {0, step, .., 1 - step} with
//! step = 2^-amp_bits.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Largest phase-bit width the code builder accepts.
pub const MAX_PHASE_BITS: u8 = 4;

/// Gray code of `k`.
fn gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// Half-space Gray matrix: row k encodes gray(k) for k < 2^(b-1), one
/// column per bit, LSB first, bit 0 mapped to +1 and bit 1 to -1.
pub fn gray_halfspace(bits: u8) -> Result<Vec<Vec<i8>>> {
    if !(1..=8).contains(&bits) {
        return Err(Error::Config(format!("gray_halfspace bits {bits} outside 1..=8")));
    }
    let rows = 1usize << (bits - 1);
    Ok((0..rows as u32)
        .map(|k| {
            let g = gray(k);
            (0..bits).map(|m| if (g >> m) & 1 == 0 { 1 } else { -1 }).collect()
        })
        .collect())
}

/// All odd-cardinality subsets of {0..bits-1}, ordered by cardinality and
/// then lexicographically. There are exactly 2^(bits-1) of them.
pub fn odd_subsets(bits: u8) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << bits))
        .filter(|m| m.count_ones() % 2 == 1)
        .map(|m| (0..bits as usize).filter(|j| (m >> j) & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Feature matrix over the half-space rows: S[k][j] is the product of the
/// j-th odd subset of Gray row k.
pub fn odd_subset_matrix(gray_rows: &[Vec<i8>]) -> Result<Vec<Vec<i8>>> {
    if gray_rows.is_empty() {
        return Err(Error::Shape("odd_subset_matrix needs at least one row".into()));
    }
    let bits = gray_rows[0].len() as u8;
    let subsets = odd_subsets(bits);
    gray_rows
        .iter()
        .map(|row| {
            if row.len() != bits as usize {
                return Err(Error::Shape("gray rows have unequal widths".into()));
            }
            Ok(subsets
                .iter()
                .map(|s| s.iter().map(|&m| row[m]).product::<i8>())
                .collect())
        })
        .collect()
}

/// Maps the odd-subset feature products of a raw bit block onto the free
/// coefficient slots. Identity for b <= 2 where slots and bits coincide.
fn feature_block(bit_signs: &[i8]) -> Vec<i8> {
    let bits = bit_signs.len() as u8;
    odd_subsets(bits)
        .iter()
        .map(|s| s.iter().map(|&m| bit_signs[m]).product::<i8>())
        .collect()
}

/// One decoded antenna phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedPhase {
    /// Snapped phase on the allowed grid, in [0, 2*pi).
    pub phase: f64,
    /// Circular distance between the pre-snap angle and the grid.
    pub snap_distance: f64,
    /// True when the spin block summed to (numerically) zero and the
    /// phase defaulted to grid index 0.
    pub degenerate: bool,
}

/// Complex coefficients that turn one antenna's spin block into a phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCode {
    bits: u8,
    coefficients: Vec<Complex64>,
    allowed_grid: Vec<f64>,
}

/// Solves the construction system S c = p and checks the residual.
pub fn build_phase_code(bits: u8) -> Result<PhaseCode> {
    if !(1..=MAX_PHASE_BITS).contains(&bits) {
        return Err(Error::Config(format!(
            "phase bits {bits} outside 1..={MAX_PHASE_BITS}"
        )));
    }
    let l = 1usize << (bits - 1);
    let s_rows = odd_subset_matrix(&gray_halfspace(bits)?)?;
    let a: Vec<Vec<Complex64>> = s_rows
        .iter()
        .map(|r| r.iter().map(|&e| Complex64::new(e as f64, 0.0)).collect())
        .collect();
    let p: Vec<Complex64> = (0..l)
        .map(|k| Complex64::from_polar(1.0, PI * k as f64 / l as f64))
        .collect();
    let coefficients = solve_complex(a.clone(), p.clone())?;
    for k in 0..l {
        let lhs: Complex64 = (0..l).map(|j| a[k][j] * coefficients[j]).sum();
        if (lhs - p[k]).norm() >= 1e-10 {
            return Err(Error::Encoding(format!(
                "construction residual {} at row {k} for bits {bits}",
                (lhs - p[k]).norm()
            )));
        }
    }
    let grid_len = 1usize << bits;
    let allowed_grid = (0..grid_len).map(|k| TAU * k as f64 / grid_len as f64).collect();
    Ok(PhaseCode { bits, coefficients, allowed_grid })
}

impl PhaseCode {
    pub fn bits(&self) -> u8 {
        self.bits
    }

    /// Spins per antenna, L = 2^(bits-1).
    pub fn spins_per_antenna(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// The 2^bits allowed phases, ascending from 0.
    pub fn allowed_grid(&self) -> &[f64] {
        &self.allowed_grid
    }

    /// Pre-snap combination weight c . s of one spin block.
    pub fn raw_weight(&self, block: &[i8]) -> Result<Complex64> {
        check_block(block, self.spins_per_antenna())?;
        Ok(self
            .coefficients
            .iter()
            .zip(block)
            .map(|(c, &s)| c * s as f64)
            .sum())
    }

    /// Decodes one spin block to a grid phase.
    pub fn decode(&self, block: &[i8]) -> Result<DecodedPhase> {
        Ok(self.decode_weight(self.raw_weight(block)?))
    }

    /// Decodes a precomputed combination weight.
    pub fn decode_weight(&self, z: Complex64) -> DecodedPhase {
        if z.norm() < 1e-12 {
            return DecodedPhase { phase: self.allowed_grid[0], snap_distance: 0.0, degenerate: true };
        }
        let raw = crate::array::wrap_phase(z.arg());
        let (phase, snap_distance) = snap_to_grid(raw, self.bits);
        DecodedPhase { phase, snap_distance, degenerate: false }
    }

    /// The consistent feature block for underlying Gray state `k`
    /// (0 <= k < 2^bits); states k >= 2^(bits-1) are the negations of the
    /// half-space rows.
    pub fn consistent_block(&self, k: u32) -> Result<Vec<i8>> {
        let states = 1u32 << self.bits;
        if k >= states {
            return Err(Error::Domain(format!("gray state {k} outside 0..{states}")));
        }
        let half = states >> 1;
        let (base, flip) = if k < half { (k, 1i8) } else { (k - half, -1i8) };
        let g = gray(base);
        let bit_signs: Vec<i8> = (0..self.bits)
            .map(|m| if (g >> m) & 1 == 0 { flip } else { -flip })
            .collect();
        Ok(feature_block(&bit_signs))
    }
}

/// Wraps `phase` and snaps it to the 2^bits grid; returns the snapped
/// phase and the circular snap distance. Exact ties resolve to the lower
/// grid index.
pub fn snap_to_grid(phase: f64, bits: u8) -> (f64, f64) {
    assert!((1..=MAX_PHASE_BITS).contains(&bits), "snap_to_grid bits {bits} outside range");
    let wrapped = crate::array::wrap_phase(phase);
    let grid_len = 1usize << bits;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..grid_len {
        let g = TAU * k as f64 / grid_len as f64;
        let d = circular_distance(wrapped, g);
        if d < best.1 {
            best = (g, d);
        }
    }
    best
}

/// Circular distance between two angles in radians.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn check_block(block: &[i8], expected_len: usize) -> Result<()> {
    if block.len() != expected_len {
        return Err(Error::Shape(format!(
            "spin block length {} does not match code length {expected_len}",
            block.len()
        )));
    }
    for &s in block {
        if s != 1 && s != -1 {
            return Err(Error::Domain(format!("spin value {s} is not +1 or -1")));
        }
    }
    Ok(())
}

/// Geometric amplitude code: coefficient k is 2^-(k+2).
#[derive(Debug, Clone, PartialEq)]
pub struct AmpCode {
    amp_bits: usize,
    coefficients: Vec<f64>,
}

/// Builds the geometric amplitude code.
pub fn build_amp_code(amp_bits: usize) -> Result<AmpCode> {
    if !(1..=32).contains(&amp_bits) {
        return Err(Error::Config(format!("amp_bits {amp_bits} outside 1..=32")));
    }
    let coefficients = (0..amp_bits).map(|k| 0.25 * 0.5f64.powi(k as i32)).collect();
    Ok(AmpCode { amp_bits, coefficients })
}

impl AmpCode {
    pub fn amp_bits(&self) -> usize {
        self.amp_bits
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Largest decodable amplitude, 1 - 2^-amp_bits.
    pub fn max_value(&self) -> f64 {
        1.0 - 0.5f64.powi(self.amp_bits as i32)
    }

    /// Grid step between adjacent decodable amplitudes, 2^-amp_bits.
    pub fn step(&self) -> f64 {
        0.5f64.powi(self.amp_bits as i32)
    }

    /// Decodes one spin block to an amplitude: sum of c_k * (1 - s_k).
    pub fn decode(&self, block: &[i8]) -> Result<f64> {
        check_block(block, self.amp_bits)?;
        Ok(self
            .coefficients
            .iter()
            .zip(block)
            .map(|(c, &s)| c * (1.0 - s as f64))
            .sum())
    }
}

/// Gaussian elimination with partial pivoting over complex numbers.
///
/// The construction systems are at most 8x8, so a dense direct solve is
/// exact enough and dependency-free.
fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Shape(format!("row {i} has length {} in {n}x{n} solve", row.len())));
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].norm().partial_cmp(&a[q][col].norm()).unwrap())
            .unwrap();
        if a[pivot][col].norm() < 1e-12 {
            return Err(Error::Encoding("singular construction system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let pivot_row = &pivot_rows[col];
        let pivot_b = b[col];
        for (row, rb) in rest.iter_mut().zip(&mut b[col + 1..]) {
            let f = row[col] / pivot_row[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            *rb -= f * pivot_b;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}
