//! Quadratic spin objectives for pattern synthesis.
//!
//! Energy convention: E(s) = -s^T J s - h^T s + offset. The builders fold
//! the blended mainlobe/sidelobe objective into (J, h, offset) so that for
//! every spin assignment the energy equals
//! blend * P_sidelobe - (1 - blend) * P_mainlobe of the decoded
//! excitation, and lower energy means a better pattern.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::array::{element_factor_power, AngleGrid};
use crate::encoding::{AmpCode, PhaseCode};
use crate::error::{Error, Result};

/// A quadratic spin problem in the form E(s) = -s^T J s - h^T s + offset.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    coupling: Array2<f64>,
    bias: Array1<f64>,
    offset: f64,
}

impl IsingProblem {
    /// Validates shape, finiteness, and symmetry (1e-12 relative to the
    /// largest coupling magnitude).
    pub fn new(coupling: Array2<f64>, bias: Array1<f64>, offset: f64) -> Result<Self> {
        let (rows, cols) = coupling.dim();
        if rows != cols {
            return Err(Error::Shape(format!("coupling matrix is {rows}x{cols}, not square")));
        }
        if bias.len() != rows {
            return Err(Error::Shape(format!(
                "bias length {} does not match {rows} spins",
                bias.len()
            )));
        }
        if !offset.is_finite()
            || coupling.iter().any(|v| !v.is_finite())
            || bias.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Domain("Ising problem entries must be finite".into()));
        }
        let scale = coupling.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..rows {
            for j in (i + 1)..rows {
                if (coupling[(i, j)] - coupling[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!(
                        "coupling matrix asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { coupling, bias, offset })
    }

    /// Number of spins.
    pub fn k(&self) -> usize {
        self.bias.len()
    }

    pub fn coupling(&self) -> &Array2<f64> {
        &self.coupling
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.bias
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Exact quadratic form: -s^T J s - h^T s + offset.
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        let k = self.k();
        if spins.len() != k {
            return Err(Error::Shape(format!(
                "assignment has {} spins, problem has {k}",
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("spin values must be +1 or -1".into()));
        }
        let mut quad = 0.0;
        for (i, row) in self.coupling.rows().into_iter().enumerate() {
            let si = spins[i] as f64;
            let mut acc = 0.0;
            for (j, &jij) in row.iter().enumerate() {
                acc += jij * spins[j] as f64;
            }
            quad += si * acc;
        }
        let lin: f64 = self.bias.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
        Ok(-quad - lin + self.offset)
    }
}

/// Target direction plus the sidelobe sampling and blending policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidelobeConfig {
    /// Mainlobe target direction in degrees.
    pub theta0_deg: f64,
    /// Half-width of the sidelobe exclusion band around theta0, degrees.
    pub guard_halfwidth_deg: f64,
    /// Sidelobe sampling step over [0, 180], degrees.
    pub sample_step_deg: f64,
    /// Weight for samples within 30 degrees of theta0.
    pub near_weight: f64,
    /// Weight for samples beyond 30 degrees of theta0.
    pub far_weight: f64,
    /// Objective mix: minimize blend * P_side - (1 - blend) * P_main.
    pub blend_weight: f64,
}

/// The per-run part of [`SidelobeConfig`]: everything except the
/// case-specific target direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SidelobeParams {
    pub guard_halfwidth_deg: f64,
    pub sample_step_deg: f64,
    pub near_weight: f64,
    pub far_weight: f64,
    pub blend_weight: f64,
}

impl Default for SidelobeParams {
    fn default() -> Self {
        Self {
            guard_halfwidth_deg: 5.0,
            sample_step_deg: 1.0,
            near_weight: 10.0,
            far_weight: 1.0,
            blend_weight: 0.5,
        }
    }
}

impl SidelobeConfig {
    pub fn for_target(theta0_deg: f64, params: &SidelobeParams) -> Self {
        Self {
            theta0_deg,
            guard_halfwidth_deg: params.guard_halfwidth_deg,
            sample_step_deg: params.sample_step_deg,
            near_weight: params.near_weight,
            far_weight: params.far_weight,
            blend_weight: params.blend_weight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta0_deg.is_finite() || !(0.0..=180.0).contains(&self.theta0_deg) {
            return Err(Error::Config(format!(
                "theta0 {} outside [0, 180] degrees",
                self.theta0_deg
            )));
        }
        if !self.guard_halfwidth_deg.is_finite()
            || self.guard_halfwidth_deg <= 0.0
            || self.guard_halfwidth_deg >= 30.0
        {
            return Err(Error::Config(format!(
                "guard halfwidth {} outside (0, 30) degrees",
                self.guard_halfwidth_deg
            )));
        }
        if !self.sample_step_deg.is_finite()
            || self.sample_step_deg <= 0.0
            || self.sample_step_deg > 180.0
        {
            return Err(Error::Config(format!(
                "sample step {} outside (0, 180] degrees",
                self.sample_step_deg
            )));
        }
        if !(self.near_weight.is_finite() && self.near_weight > 0.0)
            || !(self.far_weight.is_finite() && self.far_weight > 0.0)
        {
            return Err(Error::Config("sidelobe weights must be positive".into()));
        }
        if !self.blend_weight.is_finite()
            || self.blend_weight <= 0.0
            || self.blend_weight >= 1.0
        {
            return Err(Error::Config(format!(
                "blend weight {} outside (0, 1)",
                self.blend_weight
            )));
        }
        Ok(())
    }

    /// Weighted sidelobe sample angles: the [0, 180] grid at
    /// `sample_step_deg`, excluding angles strictly inside the guard band,
    /// with `near_weight` applied within 30 degrees of theta0 and
    /// `far_weight` beyond.
    pub fn sample_angles(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let grid = AngleGrid::new(0.0, 180.0, self.sample_step_deg)?;
        Ok(grid
            .samples()
            .iter()
            .filter(|&&t| (t - self.theta0_deg).abs() >= self.guard_halfwidth_deg)
            .map(|&t| {
                let w = if (t - self.theta0_deg).abs() <= 30.0 {
                    self.near_weight
                } else {
                    self.far_weight
                };
                (t, w)
            })
            .collect())
    }
}

/// Flattened first outer product for the phase problem: antenna-major
/// blocks d_theta,n * c_j with d_theta,n = sqrt(E(theta)) * e^{i pi n cos
/// theta}, n 1-based.
pub fn phase_field_vector(
    code: &PhaseCode,
    theta_deg: f64,
    n_antennas: usize,
) -> Result<Vec<Complex64>> {
    if n_antennas == 0 {
        return Err(Error::Config("n_antennas must be at least 1".into()));
    }
    let amp = element_factor_power(theta_deg)?.sqrt();
    let cos_t = theta_deg.to_radians().cos();
    let mut v = Vec::with_capacity(n_antennas * code.spins_per_antenna());
    for n in 0..n_antennas {
        let d = amp * Complex64::from_polar(1.0, PI * (n + 1) as f64 * cos_t);
        for c in code.coefficients() {
            v.push(d * c);
        }
    }
    Ok(v)
}

/// Real part of the rank-one outer product v v^H. For real spin vectors s,
/// s^T Re(v v^H) s = |v^T s|^2.
pub fn rank_one_coupling(v: &[Complex64]) -> Array2<f64> {
    let k = v.len();
    let mut j = Array2::zeros((k, k));
    for a in 0..k {
        for b in 0..k {
            j[(a, b)] = (v[a] * v[b].conj()).re;
        }
    }
    j
}

/// Accumulates `scale * Re(v v^H)` into `acc`.
fn accumulate_rank_one(acc: &mut Array2<f64>, v: &[Complex64], scale: f64) {
    let k = v.len();
    debug_assert_eq!(acc.dim(), (k, k));
    for a in 0..k {
        let va = v[a];
        for b in 0..k {
            acc[(a, b)] += scale * (va * v[b].conj()).re;
        }
    }
}

/// Phase-optimization problem over K = N * L free spins, h = 0:
/// J = (1 - blend) * J_main - blend * sum_j w_j * J_side_j.
pub fn phase_problem(
    code: &PhaseCode,
    cfg: &SidelobeConfig,
    n_antennas: usize,
) -> Result<IsingProblem> {
    let samples = cfg.sample_angles()?;
    if samples.is_empty() {
        return Err(Error::Config("sidelobe sample set is empty".into()));
    }
    let k = n_antennas * code.spins_per_antenna();
    let mut j = Array2::zeros((k, k));
    let v_main = phase_field_vector(code, cfg.theta0_deg, n_antennas)?;
    accumulate_rank_one(&mut j, &v_main, 1.0 - cfg.blend_weight);
    for &(theta, w) in &samples {
        let v = phase_field_vector(code, theta, n_antennas)?;
        accumulate_rank_one(&mut j, &v, -cfg.blend_weight * w);
    }
    IsingProblem::new(j, Array1::zeros(k), 0.0)
}

/// Augmented coefficient vector for the amplitude problem:
/// (-c_0, .., -c_{b-1}, sum c_i). Its entries sum to zero.
pub fn augmented_coefficients(amp: &AmpCode) -> Vec<f64> {
    let mut cp: Vec<f64> = amp.coefficients().iter().map(|c| -c).collect();
    cp.push(amp.coefficients().iter().sum());
    cp
}

/// Augmented rank-one coupling for one angle: Re(v' v'^H) with
/// v' = d (outer) c', antenna-major, b_a + 1 slots per antenna. Exposed so
/// tests can verify the degenerate d = 1 reduction.
pub fn augmented_coupling(d: &[Complex64], amp: &AmpCode) -> Array2<f64> {
    let cp = augmented_coefficients(amp);
    let v: Vec<Complex64> =
        d.iter().flat_map(|&dn| cp.iter().map(move |&c| dn * c)).collect();
    rank_one_coupling(&v)
}

/// Amplitude-optimization problem for fixed phases, over K = N * b_a
/// spins plus a bias and offset absorbing the constant slots.
///
/// Contract: for every assignment s,
/// energy(s) = blend * P_side(beta(s)) - (1 - blend) * P_main(beta(s)),
/// where beta(s) decodes each antenna's block through `amp`.
pub fn amplitude_problem(
    amp: &AmpCode,
    fixed_phases: &[f64],
    cfg: &SidelobeConfig,
    n_antennas: usize,
) -> Result<IsingProblem> {
    if fixed_phases.len() != n_antennas {
        return Err(Error::Shape(format!(
            "{} fixed phases for {n_antennas} antennas",
            fixed_phases.len()
        )));
    }
    let samples = cfg.sample_angles()?;
    if samples.is_empty() {
        return Err(Error::Config("sidelobe sample set is empty".into()));
    }
    let b = amp.amp_bits();
    let slots = b + 1;
    let kp = n_antennas * slots;
    let cp = augmented_coefficients(amp);

    // Accumulate the blended augmented coupling over all angles.
    let mut jp = Array2::zeros((kp, kp));
    let mut vp = vec![Complex64::new(0.0, 0.0); kp];
    let mut angle_terms: Vec<(f64, f64)> = Vec::with_capacity(samples.len() + 1);
    angle_terms.push((cfg.theta0_deg, 1.0 - cfg.blend_weight));
    angle_terms.extend(samples.iter().map(|&(t, w)| (t, -cfg.blend_weight * w)));
    for (theta, scale) in angle_terms {
        let e = element_factor_power(theta)?.sqrt();
        let cos_t = theta.to_radians().cos();
        for (n, &alpha) in fixed_phases.iter().enumerate() {
            let d = e * Complex64::from_polar(1.0, alpha + PI * (n + 1) as f64 * cos_t);
            for (j, &c) in cp.iter().enumerate() {
                vp[n * slots + j] = d * c;
            }
        }
        accumulate_rank_one(&mut jp, &vp, scale);
    }

    // Permute: spin slots (antenna-major) first, constant slots last.
    let k = n_antennas * b;
    let perm: Vec<usize> = (0..n_antennas)
        .flat_map(|n| (0..b).map(move |j| n * slots + j))
        .chain((0..n_antennas).map(|n| n * slots + b))
        .collect();

    let mut coupling = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            coupling[(i, j)] = jp[(perm[i], perm[j])];
        }
    }
    let mut bias = Array1::zeros(k);
    for i in 0..k {
        let mut acc = 0.0;
        for c in k..kp {
            acc += jp[(perm[i], perm[c])];
        }
        bias[i] = 2.0 * acc;
    }
    let mut constant_block = 0.0;
    for c in k..kp {
        for cc in k..kp {
            constant_block += jp[(perm[c], perm[cc])];
        }
    }
    // The full augmented form gives -s'^T J' s' = -s^T J s - h^T s - C with
    // C the constant-constant block sum; storing offset = -C keeps the
    // canonical energy() equal to the blended power objective.
    IsingProblem::new(coupling, bias, -constant_block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::raw_power;
    use crate::encoding::{build_amp_code, build_phase_code};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn blend_objective(
        phases: &[f64],
        amplitudes: &[f64],
        cfg: &SidelobeConfig,
    ) -> f64 {
        let p_main = raw_power(phases, amplitudes, cfg.theta0_deg);
        let p_side: f64 = cfg
            .sample_angles()
            .unwrap()
            .iter()
            .map(|&(t, w)| w * raw_power(phases, amplitudes, t))
            .sum();
        cfg.blend_weight * p_side - (1.0 - cfg.blend_weight) * p_main
    }

    #[test]
    fn energy_worked_values() {
        let j = ndarray::arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let p = IsingProblem::new(j, Array1::zeros(2), 0.0).unwrap();
        assert_abs_diff_eq!(p.energy(&[1, 1]).unwrap(), -2.0);
        assert_abs_diff_eq!(p.energy(&[1, -1]).unwrap(), 2.0);
        let p = IsingProblem::new(Array2::zeros((1, 1)), ndarray::arr1(&[1.0]), 0.0).unwrap();
        assert_abs_diff_eq!(p.energy(&[1]).unwrap(), -1.0);
        let p = IsingProblem::new(Array2::zeros((1, 1)), Array1::zeros(1), 5.0).unwrap();
        assert_abs_diff_eq!(p.energy(&[-1]).unwrap(), 5.0);
        assert!(p.energy(&[1, 1]).is_err());
        assert!(p.energy(&[0]).is_err());
    }

    #[test]
    fn problem_validation() {
        let asym = ndarray::arr2(&[[0.0, 1.0], [0.5, 0.0]]);
        assert!(IsingProblem::new(asym, Array1::zeros(2), 0.0).is_err());
        let j = Array2::zeros((2, 2));
        assert!(IsingProblem::new(j.clone(), Array1::zeros(3), 0.0).is_err());
        assert!(IsingProblem::new(j, Array1::zeros(2), f64::NAN).is_err());
    }

    #[test]
    fn rank_one_worked_values() {
        let j = rank_one_coupling(&[Complex64::new(1.0, 0.0)]);
        assert_abs_diff_eq!(j[(0, 0)], 1.0);
        let j = rank_one_coupling(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert_abs_diff_eq!(j[(0, 0)], 1.0);
        assert_abs_diff_eq!(j[(0, 1)], 0.0);
        assert_abs_diff_eq!(j[(1, 0)], 0.0);
        assert_abs_diff_eq!(j[(1, 1)], 1.0);
    }

    #[test]
    fn rank_one_quadratic_form_matches_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v: Vec<Complex64> = (0..6)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let j = rank_one_coupling(&v);
            let s: Vec<i8> = (0..6).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let quad: f64 = (0..6)
                .map(|a| (0..6).map(|b| s[a] as f64 * j[(a, b)] * s[b] as f64).sum::<f64>())
                .sum();
            let dot: Complex64 = v.iter().zip(&s).map(|(z, &e)| z * e as f64).sum();
            assert_relative_eq!(quad, dot.norm_sqr(), max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_field_vector_worked_values() {
        let code = build_phase_code(1).unwrap();
        let v = phase_field_vector(&code, 90.0, 1).unwrap();
        assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0].im, 0.0, epsilon = 1e-12);
        let v = phase_field_vector(&code, 60.0, 2).unwrap();
        let e = element_factor_power(60.0).unwrap().sqrt();
        assert_abs_diff_eq!(v[0].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0].im, e, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1].re, -e, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_field_vector_projects_to_field_sum() {
        // v^T s over a consistent assignment = sqrt(E) * F(theta) of the
        // decoded excitation with unit amplitudes.
        let code = build_phase_code(2).unwrap();
        let n = 3;
        let blocks: Vec<Vec<i8>> = vec![vec![1, 1], vec![-1, 1], vec![-1, -1]];
        let phases: Vec<f64> =
            blocks.iter().map(|b| code.decode(b).unwrap().phase).collect();
        let amps = vec![1.0; n];
        for theta in [30.0, 77.0, 150.0] {
            let v = phase_field_vector(&code, theta, n).unwrap();
            let s: Vec<i8> = blocks.concat();
            let dot: Complex64 = v.iter().zip(&s).map(|(z, &e)| z * e as f64).sum();
            let expect = element_factor_power(theta).unwrap()
                * crate::array::raw_field(&phases, &amps, theta).norm_sqr();
            assert_relative_eq!(dot.norm_sqr(), expect, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    fn test_sidelobe(theta0: f64) -> SidelobeConfig {
        SidelobeConfig::for_target(theta0, &SidelobeParams::default())
    }

    #[test]
    fn sample_angles_excludes_guard_and_weights_bands() {
        let cfg = test_sidelobe(90.0);
        let samples = cfg.sample_angles().unwrap();
        assert!(samples.iter().all(|&(t, _)| (t - 90.0).abs() >= 5.0));
        for &(t, w) in &samples {
            if (t - 90.0).abs() <= 30.0 {
                assert_eq!(w, 10.0);
            } else {
                assert_eq!(w, 1.0);
            }
        }
        // Angles at the guard boundary stay in; 181 samples minus the 9
        // interior angles 86..=94.
        assert_eq!(samples.len(), 172);
    }

    #[test]
    fn empty_sample_set_is_config_error() {
        let mut cfg = test_sidelobe(0.0);
        cfg.sample_step_deg = 179.0;
        cfg.guard_halfwidth_deg = 5.0;
        // Samples are {0, 179}; 0 is inside the guard of theta0 = 0, and
        // 179 survives, so shrink the grid to a single excluded sample.
        cfg.sample_step_deg = 180.5; // invalid (> 180) -> config error
        assert!(cfg.sample_angles().is_err());
        let mut cfg = test_sidelobe(0.0);
        cfg.sample_step_deg = 180.0;
        cfg.guard_halfwidth_deg = 5.0;
        // Samples {0, 180}: 0 excluded, 180 kept -> non-empty.
        assert_eq!(cfg.sample_angles().unwrap().len(), 1);
    }

    #[test]
    fn main_dominant_problem_has_aligned_ground_state() {
        // With a vanishing sidelobe blend the objective reduces to
        // maximizing |v_theta0^T s|^2; at theta0 = 90 the steering phases
        // vanish, so the aligned states +-(1, 1) are the minima.
        let code = build_phase_code(1).unwrap();
        let mut cfg = test_sidelobe(90.0);
        cfg.blend_weight = 1e-9;
        let p = phase_problem(&code, &cfg, 2).unwrap();
        let states: [[i8; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
        let energies: Vec<f64> =
            states.iter().map(|s| p.energy(s).unwrap()).collect();
        assert!(energies[0] < energies[1] - 1.0);
        assert!(energies[0] < energies[2] - 1.0);
        assert_relative_eq!(energies[0], energies[3], max_relative = 1e-9);
    }

    #[test]
    fn phase_problem_energy_matches_direct_objective() {
        let code = build_phase_code(2).unwrap();
        let n = 4;
        let cfg = test_sidelobe(75.0);
        let p = phase_problem(&code, &cfg, n).unwrap();
        let l = code.spins_per_antenna();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s: Vec<i8> =
                (0..n * l).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            // The direct objective uses the raw (pre-snap) complex weights,
            // which for b = 2 are exactly on the unit circle.
            let mut phases = Vec::with_capacity(n);
            for block in s.chunks(l) {
                let z = code.raw_weight(block).unwrap();
                assert!((z.norm() - 1.0).abs() < 1e-9);
                phases.push(z.arg());
            }
            let amps = vec![1.0; n];
            let direct = blend_objective(&phases, &amps, &cfg);
            let e = p.energy(&s).unwrap();
            assert_relative_eq!(e, direct, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn augmented_reduces_to_literal_form_for_unit_d() {
        let amp = build_amp_code(3).unwrap();
        let n = 4;
        let d = vec![Complex64::new(1.0, 0.0); n];
        let got = augmented_coupling(&d, &amp);
        // Literal construction: v' = 1_N (outer) c'.
        let cp = augmented_coefficients(&amp);
        let k = n * cp.len();
        let mut want = Array2::zeros((k, k));
        for i in 0..k {
            for j in 0..k {
                want[(i, j)] = cp[i % cp.len()] * cp[j % cp.len()];
            }
        }
        for i in 0..k {
            for j in 0..k {
                assert_abs_diff_eq!(got[(i, j)], want[(i, j)], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn amplitude_problem_two_state_ground_state() {
        // N=1, b_a=1: beta in {0, 0.5}. With the mainlobe dominant the
        // ground state takes the larger amplitude.
        let amp = build_amp_code(1).unwrap();
        let mut cfg = test_sidelobe(90.0);
        cfg.blend_weight = 1e-9;
        let p = amplitude_problem(&amp, &[0.0], &cfg, 1).unwrap();
        let e_plus = p.energy(&[1]).unwrap(); // beta = 0
        let e_minus = p.energy(&[-1]).unwrap(); // beta = 0.5
        assert!(e_minus < e_plus);
        assert_relative_eq!(e_minus, -(1.0 - 1e-9) * 0.25, max_relative = 1e-6);
    }

    #[test]
    fn amplitude_problem_zero_excitation_has_zero_energy() {
        let amp = build_amp_code(3).unwrap();
        let cfg = test_sidelobe(70.0);
        let phases = [0.3, 5.1, 2.2];
        let p = amplitude_problem(&amp, &phases, &cfg, 3).unwrap();
        let s = vec![1i8; p.k()];
        assert_abs_diff_eq!(p.energy(&s).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn amplitude_problem_energy_matches_direct_objective() {
        let amp = build_amp_code(2).unwrap();
        let n = 3;
        let cfg = test_sidelobe(100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phases: Vec<f64> =
            (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let p = amplitude_problem(&amp, &phases, &cfg, n).unwrap();
        for _ in 0..200 {
            let s: Vec<i8> =
                (0..p.k()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let betas: Vec<f64> = s
                .chunks(amp.amp_bits())
                .map(|block| amp.decode(block).unwrap())
                .collect();
            let direct = blend_objective(&phases, &betas, &cfg);
            let e = p.energy(&s).unwrap();
            assert_relative_eq!(e, direct, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn built_matrices_are_exactly_symmetric() {
        let code = build_phase_code(3).unwrap();
        let cfg = test_sidelobe(60.0);
        let p = phase_problem(&code, &cfg, 3).unwrap();
        let j = p.coupling();
        for i in 0..p.k() {
            for jj in 0..p.k() {
                assert_eq!(j[(i, jj)], j[(jj, i)]);
            }
        }
    }

    #[test]
    fn amplitude_problem_rejects_phase_mismatch() {
        let amp = build_amp_code(2).unwrap();
        let cfg = test_sidelobe(90.0);
        assert!(amplitude_problem(&amp, &[0.0, 0.0], &cfg, 3).is_err());
    }
}
