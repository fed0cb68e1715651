//! Batched spin-dynamics heuristics over [`IsingProblem`], plus an exact
//! brute-force oracle and a rainbow ensemble runner.
//!
//! All seven dynamics share one scaffold: a K x batch analog state evolves
//! for a fixed number of steps under the problem field xi * (J x + h),
//! then spins are read out as signs (sign(0) counts as +1) and energies
//! recomputed through [`IsingProblem::energy`]. The contract for every
//! kind is behavioral (ground-state recovery against the brute-force
//! oracle), not equation exactness, so each rule's constants are exposed
//! through [`SolverConfig`] overrides.
//!
//! Determinism: each kind draws from its own counter-based stream of a
//! ChaCha8 generator seeded by `SolverConfig::seed`, so enabling or
//! disabling one kind never perturbs another's trajectory, and serial and
//! concurrent rainbow runs agree bit-for-bit.

use ndarray::{Array2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ising::IsingProblem;

/// The seven ensemble members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Ballistic simulated bifurcation.
    Bsb,
    /// Discrete simulated bifurcation.
    Dsb,
    /// Simulated coherent Ising machine.
    SimCim,
    /// Local quantum annealing.
    Lqa,
    /// Chaotic amplitude control.
    Cac,
    /// Chaotic feedback control.
    Cfc,
    /// Noisy mean-field annealing.
    Nmfa,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::Bsb,
        SolverKind::Dsb,
        SolverKind::SimCim,
        SolverKind::Lqa,
        SolverKind::Cac,
        SolverKind::Cfc,
        SolverKind::Nmfa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Bsb => "bsb",
            SolverKind::Dsb => "dsb",
            SolverKind::SimCim => "simcim",
            SolverKind::Lqa => "lqa",
            SolverKind::Cac => "cac",
            SolverKind::Cfc => "cfc",
            SolverKind::Nmfa => "nmfa",
        }
    }

    /// RNG stream tag; stream 0 is reserved for non-solver use.
    fn stream_id(self) -> u64 {
        match self {
            SolverKind::Bsb => 1,
            SolverKind::Dsb => 2,
            SolverKind::SimCim => 3,
            SolverKind::Lqa => 4,
            SolverKind::Cac => 5,
            SolverKind::Cfc => 6,
            SolverKind::Nmfa => 7,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown solver kind {s:?}")))
    }
}

/// Per-kind parameter overrides; unset fields fall back to the shared
/// values. Rule-specific constants go into `extra` (see module docs of
/// each dynamic for the recognized keys).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KindOverride {
    pub batch_size: Option<usize>,
    pub iterations: Option<usize>,
    pub dt: Option<f64>,
    pub xi: Option<f64>,
    pub noise_amplitude: Option<f64>,
    pub extra: BTreeMap<String, f64>,
}

/// Shared solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Trajectories per kind.
    pub batch_size: usize,
    /// Update steps per trajectory.
    pub iterations: usize,
    /// Integrator time step.
    pub dt: f64,
    /// Coupling scale; `None` selects 0.5 / (sqrt(K) * std(J)), falling
    /// back to 1.0 for couplings with (near-)zero spread.
    pub xi: Option<f64>,
    /// Scale of the stochastic term in the noisy dynamics.
    pub noise_amplitude: f64,
    /// Master seed; fully determines every kind's output.
    pub seed: u64,
    /// Per-kind overrides.
    pub overrides: BTreeMap<SolverKind, KindOverride>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            iterations: 1000,
            dt: 0.3,
            xi: None,
            noise_amplitude: 0.1,
            seed: 0,
            overrides: BTreeMap::new(),
        }
    }
}

/// Parameters resolved for one kind.
#[derive(Debug, Clone)]
pub struct KindParams {
    pub batch_size: usize,
    pub iterations: usize,
    pub dt: f64,
    pub xi: Option<f64>,
    pub noise_amplitude: f64,
    extra: BTreeMap<String, f64>,
}

impl KindParams {
    fn extra_or(&self, key: &str, default: f64) -> f64 {
        self.extra.get(key).copied().unwrap_or(default)
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for kind in SolverKind::ALL {
            let p = self.params_for(kind);
            if p.batch_size == 0 {
                return Err(Error::Config(format!("{kind}: batch_size must be at least 1")));
            }
            if p.iterations == 0 {
                return Err(Error::Config(format!("{kind}: iterations must be at least 1")));
            }
            if !p.dt.is_finite() || p.dt <= 0.0 {
                return Err(Error::Config(format!("{kind}: dt {} must be positive", p.dt)));
            }
            if let Some(xi) = p.xi {
                if !xi.is_finite() || xi <= 0.0 {
                    return Err(Error::Config(format!("{kind}: xi {xi} must be positive")));
                }
            }
            if !p.noise_amplitude.is_finite() || p.noise_amplitude < 0.0 {
                return Err(Error::Config(format!(
                    "{kind}: noise_amplitude {} must be >= 0",
                    p.noise_amplitude
                )));
            }
            for (key, value) in &p.extra {
                if !value.is_finite() {
                    return Err(Error::Config(format!("{kind}: extra {key} must be finite")));
                }
            }
        }
        Ok(())
    }

    /// Resolves the effective parameters for one kind.
    pub fn params_for(&self, kind: SolverKind) -> KindParams {
        let o = self.overrides.get(&kind);
        KindParams {
            batch_size: o.and_then(|o| o.batch_size).unwrap_or(self.batch_size),
            iterations: o.and_then(|o| o.iterations).unwrap_or(self.iterations),
            dt: o.and_then(|o| o.dt).unwrap_or(self.dt),
            xi: o.and_then(|o| o.xi).or(self.xi),
            noise_amplitude: o.and_then(|o| o.noise_amplitude).unwrap_or(self.noise_amplitude),
            extra: o.map(|o| o.extra.clone()).unwrap_or_default(),
        }
    }
}

/// A batch of read-out spin assignments with recomputed energies.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateBatch {
    pub spins: Vec<Vec<i8>>,
    pub energies: Vec<f64>,
    pub provenance: Vec<SolverKind>,
}

impl CandidateBatch {
    pub fn empty() -> Self {
        Self { spins: Vec::new(), energies: Vec::new(), provenance: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Index and energy of the best candidate; ties keep the lowest index.
    pub fn best(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &e) in self.energies.iter().enumerate() {
            if best.map_or(true, |(_, be)| e < be) {
                best = Some((i, e));
            }
        }
        best
    }

    fn extend(&mut self, other: CandidateBatch) {
        self.spins.extend(other.spins);
        self.energies.extend(other.energies);
        self.provenance.extend(other.provenance);
    }
}

/// Effective coupling scale: the override when set, otherwise
/// 0.5 / (sqrt(K) * std(J)) with a fallback of 1.0 when the coupling
/// entries have (near-)zero spread.
fn resolve_xi(problem: &IsingProblem, xi: Option<f64>) -> f64 {
    if let Some(v) = xi {
        return v;
    }
    let j = problem.coupling();
    let n = j.len() as f64;
    let mean = j.sum() / n;
    let var = j.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    let k = problem.k() as f64;
    if sd < 1e-12 {
        1.0
    } else {
        0.5 / (k.sqrt() * sd)
    }
}

/// xi * (J x + h), h broadcast over batch columns.
fn problem_field(problem: &IsingProblem, x: &Array2<f64>, xi: f64) -> Array2<f64> {
    let mut f = problem.coupling().dot(x);
    f += &problem.bias().view().insert_axis(Axis(1));
    f *= xi;
    f
}

fn uniform_init(rng: &mut ChaCha8Rng, k: usize, batch: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((k, batch), |_| rng.random_range(-scale..scale))
}

fn add_noise(x: &mut Array2<f64>, rng: &mut ChaCha8Rng, std: f64) {
    if std == 0.0 {
        return;
    }
    for v in x.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *v += std * g;
    }
}

/// Runs one kind's dynamics and reads out a candidate batch.
pub fn solve(
    problem: &IsingProblem,
    kind: SolverKind,
    config: &SolverConfig,
) -> Result<CandidateBatch> {
    config.validate()?;
    if problem.k() == 0 {
        return Err(Error::Config("cannot solve a zero-spin problem".into()));
    }
    let params = config.params_for(kind);
    let xi = resolve_xi(problem, params.xi);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(kind.stream_id());
    let state = match kind {
        SolverKind::Bsb => run_bsb(problem, &params, xi, &mut rng, false),
        SolverKind::Dsb => run_bsb(problem, &params, xi, &mut rng, true),
        SolverKind::SimCim => run_simcim(problem, &params, xi, &mut rng),
        SolverKind::Lqa => run_lqa(problem, &params, xi, &mut rng),
        SolverKind::Cac => run_cac(problem, &params, xi, &mut rng, false),
        SolverKind::Cfc => run_cac(problem, &params, xi, &mut rng, true),
        SolverKind::Nmfa => run_nmfa(problem, &params, xi, &mut rng),
    };
    readout(problem, &state, kind)
}

fn readout(problem: &IsingProblem, x: &Array2<f64>, kind: SolverKind) -> Result<CandidateBatch> {
    let batch = x.ncols();
    let mut spins = Vec::with_capacity(batch);
    let mut energies = Vec::with_capacity(batch);
    for col in x.columns() {
        let s: Vec<i8> = col.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect();
        energies.push(problem.energy(&s)?);
        spins.push(s);
    }
    Ok(CandidateBatch { spins, energies, provenance: vec![kind; batch] })
}

/// Ballistic / discrete simulated bifurcation. Second-order dynamics
/// x'' = (a(t) - 1) x + xi * (J x + h) with a(t) ramping linearly from 0
/// to 1, integrated by symplectic Euler; positions are clamped to
/// [-1, 1] with the velocity zeroed at the wall. The discrete variant
/// feeds sign(x) into the coupling instead of x.
///
/// Extra keys: `init_scale` (uniform init half-width; default 0.5
/// ballistic, 0.1 discrete), `xi_factor` (multiplier on the resolved
/// coupling scale; default 1.5 ballistic, 1.0 discrete) and `bsb_noise`
/// (velocity kick scale, annealed by (1 - a(t)); default 0.1 ballistic,
/// 0 discrete). The wider init, hotter coupling and annealed kicks keep
/// the ballistic batch spread across basins; the discrete variant gets
/// that diversity from its sign nonlinearity.
fn run_bsb(
    problem: &IsingProblem,
    p: &KindParams,
    xi: f64,
    rng: &mut ChaCha8Rng,
    discrete: bool,
) -> Array2<f64> {
    let k = problem.k();
    let init = p.extra_or("init_scale", if discrete { 0.1 } else { 0.5 });
    let xi = xi * p.extra_or("xi_factor", if discrete { 1.0 } else { 1.5 });
    let noise = p.extra_or("bsb_noise", if discrete { 0.0 } else { 0.1 });
    let mut x = uniform_init(rng, k, p.batch_size, init);
    let mut y = uniform_init(rng, k, p.batch_size, init);
    for t in 0..p.iterations {
        let a = (t + 1) as f64 / p.iterations as f64;
        let force = if discrete {
            problem_field(problem, &x.mapv(|v| if v >= 0.0 { 1.0 } else { -1.0 }), xi)
        } else {
            problem_field(problem, &x, xi)
        };
        azip_update_bsb(&mut x, &mut y, &force, a, p.dt);
        if noise > 0.0 {
            add_noise(&mut y, rng, noise * (1.0 - a));
        }
    }
    x
}

fn azip_update_bsb(x: &mut Array2<f64>, y: &mut Array2<f64>, force: &Array2<f64>, a: f64, dt: f64) {
    for ((xv, yv), &fv) in x.iter_mut().zip(y.iter_mut()).zip(force.iter()) {
        *yv += dt * ((a - 1.0) * *xv + fv);
        *xv += dt * *yv;
        if *xv > 1.0 {
            *xv = 1.0;
            *yv = 0.0;
        } else if *xv < -1.0 {
            *xv = -1.0;
            *yv = 0.0;
        }
    }
}

/// Simulated coherent Ising machine: first-order amplitude iteration
/// x <- x + dt * ((p(t) - 1) x + xi * (J x + h)) + noise, with the gain
/// p(t) ramping linearly from 0 to 1 and amplitudes clamped to [-1, 1].
/// The noise is Gaussian with standard deviation
/// noise_amplitude * sqrt(dt).
///
/// Extra keys: `init_scale` (default 0.1).
fn run_simcim(
    problem: &IsingProblem,
    p: &KindParams,
    xi: f64,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let k = problem.k();
    let mut x = uniform_init(rng, k, p.batch_size, p.extra_or("init_scale", 0.1));
    let noise_std = p.noise_amplitude * p.dt.sqrt();
    for t in 0..p.iterations {
        let gain = (t + 1) as f64 / p.iterations as f64;
        let force = problem_field(problem, &x, xi);
        for (xv, &fv) in x.iter_mut().zip(force.iter()) {
            *xv += p.dt * ((gain - 1.0) * *xv + fv);
        }
        add_noise(&mut x, rng, noise_std);
        x.mapv_inplace(|v| v.clamp(-1.0, 1.0));
    }
    x
}

/// Local quantum annealing: continuous angles a parameterize soft spins
/// z = sin(a). The cost interpolates between a transverse term (minimized
/// at a = 0) and the problem term, so the gradient is
/// (1 - s(t)) sin(a) - s(t) * xi * (2 J z + h) cos(a), descended with
/// momentum. Readout is the sign of sin(a).
///
/// Extra keys: `lqa_lr` (step size, default 0.1), `lqa_momentum`
/// (default 0.9), `lqa_gamma` (problem-term weight, default 1.0),
/// `lqa_noise` (Langevin noise scale, annealed by (1 - s(t)), default
/// 0.4), `init_scale` (angle init half-width, default 0.1).
///
/// The annealed noise keeps batch members on distinct trajectories
/// through the transverse-dominated phase, where plain momentum descent
/// would contract them all onto one path; it vanishes as s(t) -> 1, so
/// the final descent is noiseless.
fn run_lqa(problem: &IsingProblem, p: &KindParams, xi: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let k = problem.k();
    let lr = p.extra_or("lqa_lr", 0.1);
    let momentum = p.extra_or("lqa_momentum", 0.9);
    let gamma = p.extra_or("lqa_gamma", 1.0);
    let noise = p.extra_or("lqa_noise", 0.4);
    let mut a = uniform_init(rng, k, p.batch_size, p.extra_or("init_scale", 0.1));
    let mut vel = Array2::<f64>::zeros((k, p.batch_size));
    for t in 0..p.iterations {
        let s = (t + 1) as f64 / p.iterations as f64;
        let noise_std = noise * (1.0 - s);
        let z = a.mapv(f64::sin);
        let mut field = problem.coupling().dot(&z);
        field.mapv_inplace(|v| 2.0 * v);
        field += &problem.bias().view().insert_axis(Axis(1));
        field *= xi * gamma;
        for (((av, vv), &fv), &zv) in
            a.iter_mut().zip(vel.iter_mut()).zip(field.iter()).zip(z.iter())
        {
            let grad = (1.0 - s) * zv - s * fv * av.cos();
            *vv = momentum * *vv - lr * grad;
            *av += *vv;
            if noise_std > 0.0 {
                let g: f64 = rng.sample(StandardNormal);
                *av += noise_std * g;
            }
        }
    }
    a.mapv(f64::sin)
}

/// Chaotic amplitude control and chaotic feedback control. Mean-field
/// dynamics x' = (p(t) - 1 - x^2) x + injection with per-spin error
/// variables e. CAC multiplies the injection by e and drives x^2 toward
/// the target: e' = -feedback_rate * e * (x^2 - target_amplitude). CFC
/// feeds e * x through the coupling instead and normalizes that coupling
/// contribution, driving (e x)^2 toward the target.
///
/// Extra keys: `feedback_rate` (default 0.3 amplitude variant, 1.0
/// coupling variant), `target_amplitude` (default 1.0), `init_scale`
/// (default 0.5).
fn run_cac(
    problem: &IsingProblem,
    p: &KindParams,
    xi: f64,
    rng: &mut ChaCha8Rng,
    feedback_in_coupling: bool,
) -> Array2<f64> {
    let k = problem.k();
    let beta = p.extra_or("feedback_rate", if feedback_in_coupling { 1.0 } else { 0.3 });
    let target = p.extra_or("target_amplitude", 1.0);
    let mut x = uniform_init(rng, k, p.batch_size, p.extra_or("init_scale", 0.5));
    let mut e = Array2::from_elem((k, p.batch_size), 1.0);
    for t in 0..p.iterations {
        let pump = (t + 1) as f64 / p.iterations as f64;
        let force = if feedback_in_coupling {
            let coupled = &e * &x;
            problem_field(problem, &coupled, xi)
        } else {
            problem_field(problem, &x, xi)
        };
        for ((xv, ev), &fv) in x.iter_mut().zip(e.iter_mut()).zip(force.iter()) {
            let inject = if feedback_in_coupling { fv } else { *ev * fv };
            let dx = (pump - 1.0 - *xv * *xv) * *xv + inject;
            *xv = (*xv + p.dt * dx).clamp(-1.5, 1.5);
            let drive = if feedback_in_coupling { *ev * *xv } else { *xv };
            let de = -beta * *ev * (drive * drive - target);
            *ev = (*ev + p.dt * de).clamp(0.01, 10.0);
        }
    }
    x
}

/// Noisy mean-field annealing: m <- (1 - rho) m + rho * tanh(xi * (J m +
/// h) / T(t)) + noise, with a geometric temperature schedule from
/// `temp_start` down to `temp_end` and the result clamped to [-1, 1].
/// The noise term is Gaussian with standard deviation
/// noise_amplitude * nmfa_noise_factor * T(t) / temp_start, so the
/// jitter anneals away with the temperature. The factor exists because
/// this rule takes one full mix per step while the other noisy rule
/// accumulates many small dt-scaled kicks, so comparable exploration
/// needs a larger per-step scale here.
///
/// Extra keys: `nmfa_mix` (rho, default 0.5), `temp_start` (default 2.0),
/// `temp_end` (default 0.02), `nmfa_noise_factor` (default 8.0),
/// `init_scale` (default 1.0).
fn run_nmfa(problem: &IsingProblem, p: &KindParams, xi: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let k = problem.k();
    let rho = p.extra_or("nmfa_mix", 0.5);
    let temp_start = p.extra_or("temp_start", 2.0);
    let temp_end = p.extra_or("temp_end", 0.02);
    let noise_scale = p.noise_amplitude * p.extra_or("nmfa_noise_factor", 8.0);
    let mut m = uniform_init(rng, k, p.batch_size, p.extra_or("init_scale", 1.0));
    for t in 0..p.iterations {
        let frac = if p.iterations > 1 { t as f64 / (p.iterations - 1) as f64 } else { 1.0 };
        let temp = temp_start * (temp_end / temp_start).powf(frac);
        let noise_std = noise_scale * temp / temp_start;
        let field = problem_field(problem, &m, xi);
        for (mv, &fv) in m.iter_mut().zip(field.iter()) {
            let g: f64 = rng.sample(StandardNormal);
            let next = (1.0 - rho) * *mv + rho * (fv / temp).tanh() + noise_std * g;
            *mv = next.clamp(-1.0, 1.0);
        }
    }
    m
}

/// Runs every kind in `kinds` (duplicates ignored, order preserved) and
/// concatenates the batches. Kinds run on parallel workers; collection is
/// ordered, and per-kind RNG streams make the result identical to running
/// each kind serially.
pub fn rainbow_solve(
    problem: &IsingProblem,
    config: &SolverConfig,
    kinds: &[SolverKind],
) -> Result<CandidateBatch> {
    let mut unique: Vec<SolverKind> = Vec::new();
    for &k in kinds {
        if !unique.contains(&k) {
            unique.push(k);
        }
    }
    let batches: Vec<CandidateBatch> = unique
        .par_iter()
        .map(|&kind| solve(problem, kind, config))
        .collect::<Result<_>>()?;
    let mut out = CandidateBatch::empty();
    for b in batches {
        out.extend(b);
    }
    Ok(out)
}

/// Exact minimizer by Gray-code enumeration with incremental energy
/// updates; supports up to 24 spins. Ties resolve to the first assignment
/// in lexicographic spin order with +1 ordered before -1.
pub fn brute_force(problem: &IsingProblem) -> Result<(Vec<i8>, f64)> {
    let k = problem.k();
    if k == 0 {
        return Err(Error::Config("cannot enumerate a zero-spin problem".into()));
    }
    if k > 24 {
        return Err(Error::Config(format!("brute force supports at most 24 spins, got {k}")));
    }
    let j = problem.coupling();
    let jf = j.as_slice().expect("coupling is standard layout");
    let h = problem.bias();

    let mut s = vec![1i8; k];
    // Local fields f_i = sum_j J_ij s_j.
    let mut f: Vec<f64> = (0..k).map(|i| jf[i * k..(i + 1) * k].iter().sum()).collect();
    let mut energy = problem.energy(&s)?;

    let mut best_s = s.clone();
    let mut best_e = energy;
    let total: u64 = 1 << k;
    for step in 1..total {
        // Gray enumeration: step i flips bit trailing_zeros(i).
        let flip = step.trailing_zeros() as usize;
        let old = s[flip] as f64;
        energy += 4.0 * old * (f[flip] - jf[flip * k + flip] * old) + 2.0 * h[flip] * old;
        for (i, fv) in f.iter_mut().enumerate() {
            *fv -= 2.0 * jf[i * k + flip] * old;
        }
        s[flip] = -s[flip];
        if energy < best_e {
            best_e = energy;
            best_s.copy_from_slice(&s);
        } else if energy == best_e && lex_less(&s, &best_s) {
            best_s.copy_from_slice(&s);
        }
    }
    // Recompute exactly to shed incremental floating error.
    let exact = problem.energy(&best_s)?;
    Ok((best_s, exact))
}

/// Lexicographic order with +1 before -1.
fn lex_less(a: &[i8], b: &[i8]) -> bool {
    for (&x, &y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array1};

    fn ferromagnet() -> IsingProblem {
        IsingProblem::new(arr2(&[[0.0, 1.0], [1.0, 0.0]]), Array1::zeros(2), 0.0).unwrap()
    }

    fn random_problem(k: usize, seed: u64, bias_scale: f64) -> IsingProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut j = Array2::zeros((k, k));
        for i in 0..k {
            for jj in (i + 1)..k {
                let v: f64 = rng.sample(StandardNormal);
                j[(i, jj)] = v;
                j[(jj, i)] = v;
            }
        }
        let h = Array1::from_iter((0..k).map(|_| {
            let v: f64 = rng.sample(StandardNormal);
            bias_scale * v
        }));
        IsingProblem::new(j, h, 0.0).unwrap()
    }

    #[test]
    fn every_kind_solves_the_ferromagnet() {
        let problem = ferromagnet();
        let config = SolverConfig::default();
        for kind in SolverKind::ALL {
            let batch = solve(&problem, kind, &config).unwrap();
            assert_eq!(batch.len(), 64);
            let aligned = batch
                .spins
                .iter()
                .filter(|s| s[0] == s[1])
                .count();
            assert!(aligned * 10 >= 58 * 10, "{kind}: {aligned}/64 aligned");
            for (s, &e) in batch.spins.iter().zip(&batch.energies) {
                assert_eq!(e, problem.energy(s).unwrap());
            }
        }
    }

    #[test]
    fn every_kind_aligns_single_spin_with_bias() {
        let problem =
            IsingProblem::new(Array2::zeros((1, 1)), arr1(&[1.0]), 0.0).unwrap();
        let config = SolverConfig::default();
        for kind in SolverKind::ALL {
            let batch = solve(&problem, kind, &config).unwrap();
            for (s, &e) in batch.spins.iter().zip(&batch.energies) {
                assert_eq!(s[0], 1, "{kind}");
                assert_eq!(e, -1.0, "{kind}");
            }
        }
    }

    #[test]
    fn solving_is_deterministic_per_seed() {
        let problem = random_problem(8, 42, 0.3);
        let config = SolverConfig { batch_size: 8, iterations: 200, ..Default::default() };
        for kind in SolverKind::ALL {
            let a = solve(&problem, kind, &config).unwrap();
            let b = solve(&problem, kind, &config).unwrap();
            assert_eq!(a, b, "{kind}");
        }
        // Different seeds give different random inits; one step is not
        // enough to converge, so the readout still reflects the init.
        let short = SolverConfig { batch_size: 8, iterations: 1, ..Default::default() };
        let other = SolverConfig { seed: 1, ..short.clone() };
        let a = solve(&problem, SolverKind::Bsb, &short).unwrap();
        let b = solve(&problem, SolverKind::Bsb, &other).unwrap();
        assert_ne!(a.spins, b.spins);
    }

    #[test]
    fn rejects_degenerate_problems() {
        let empty =
            IsingProblem::new(Array2::zeros((0, 0)), Array1::zeros(0), 0.0).unwrap();
        assert!(solve(&empty, SolverKind::Bsb, &SolverConfig::default()).is_err());
        assert!(brute_force(&empty).is_err());
        let big = IsingProblem::new(Array2::zeros((25, 25)), Array1::zeros(25), 0.0).unwrap();
        assert!(brute_force(&big).is_err());
    }

    #[test]
    fn zero_spread_coupling_falls_back_to_unit_xi() {
        // J = 0 gives sigma_J = 0; the run must stay finite and align with
        // the bias.
        let problem =
            IsingProblem::new(Array2::zeros((3, 3)), arr1(&[1.0, -1.0, 1.0]), 0.0).unwrap();
        for kind in SolverKind::ALL {
            let batch = solve(&problem, kind, &SolverConfig::default()).unwrap();
            let (_, e) = batch.best().unwrap();
            assert_eq!(e, -3.0, "{kind}");
        }
    }

    #[test]
    fn bias_only_solutions_flip_with_bias() {
        let h = arr1(&[1.5, -2.0, 0.7, -0.4]);
        let plus = IsingProblem::new(Array2::zeros((4, 4)), h.clone(), 0.0).unwrap();
        let minus = IsingProblem::new(Array2::zeros((4, 4)), -h, 0.0).unwrap();
        let config = SolverConfig { batch_size: 16, iterations: 300, ..Default::default() };
        for kind in SolverKind::ALL {
            let a = solve(&plus, kind, &config).unwrap();
            let b = solve(&minus, kind, &config).unwrap();
            assert_eq!(a.energies, b.energies, "{kind}");
            for (sa, sb) in a.spins.iter().zip(&b.spins) {
                let flipped: Vec<i8> = sb.iter().map(|&v| -v).collect();
                assert_eq!(*sa, flipped, "{kind}");
            }
        }
    }

    #[test]
    fn rainbow_matches_single_kind_and_counts() {
        let problem = random_problem(6, 7, 0.2);
        let config = SolverConfig { batch_size: 32, iterations: 200, ..Default::default() };
        let single = solve(&problem, SolverKind::Bsb, &config).unwrap();
        let rainbow = rainbow_solve(&problem, &config, &[SolverKind::Bsb]).unwrap();
        assert_eq!(single, rainbow);

        let all = rainbow_solve(&problem, &config, &SolverKind::ALL).unwrap();
        assert_eq!(all.len(), 224);
        let mut kinds: Vec<SolverKind> = all.provenance.clone();
        kinds.dedup();
        assert_eq!(kinds.len(), 7);

        let union_best = all.best().unwrap().1;
        for kind in SolverKind::ALL {
            let best = solve(&problem, kind, &config).unwrap().best().unwrap().1;
            assert!(union_best <= best);
        }
    }

    #[test]
    fn rainbow_streams_are_independent_of_enabled_set() {
        let problem = random_problem(6, 13, 0.2);
        let config = SolverConfig { batch_size: 8, iterations: 100, ..Default::default() };
        let solo = rainbow_solve(&problem, &config, &[SolverKind::Nmfa]).unwrap();
        let all = rainbow_solve(&problem, &config, &SolverKind::ALL).unwrap();
        let nmfa_slice_start = 6 * 8;
        assert_eq!(&all.spins[nmfa_slice_start..], &solo.spins[..]);
    }

    #[test]
    fn brute_force_worked_values() {
        let (s, e) = brute_force(&ferromagnet()).unwrap();
        assert_eq!(s, vec![1, 1]);
        assert_eq!(e, -2.0);
        let problem =
            IsingProblem::new(Array2::zeros((1, 1)), arr1(&[-1.0]), 0.0).unwrap();
        let (s, e) = brute_force(&problem).unwrap();
        assert_eq!(s, vec![-1]);
        assert_eq!(e, -1.0);
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        for seed in 0..5u64 {
            let problem = random_problem(8, 100 + seed, 0.5);
            let (s, e) = brute_force(&problem).unwrap();
            let mut naive_best = f64::INFINITY;
            let mut naive_s = vec![1i8; 8];
            for mask in 0..(1u32 << 8) {
                let cand: Vec<i8> =
                    (0..8).map(|b| if (mask >> (7 - b)) & 1 == 0 { 1 } else { -1 }).collect();
                let ce = problem.energy(&cand).unwrap();
                if ce < naive_best {
                    naive_best = ce;
                    naive_s = cand;
                }
            }
            assert!((e - naive_best).abs() < 1e-9, "seed {seed}");
            assert_eq!(s, naive_s, "seed {seed}");
        }
    }

    #[test]
    fn heuristics_never_beat_the_oracle() {
        for seed in 0..3u64 {
            let problem = random_problem(10, 200 + seed, 0.3);
            let (_, oracle) = brute_force(&problem).unwrap();
            let config =
                SolverConfig { batch_size: 16, iterations: 400, seed, ..Default::default() };
            let batch = rainbow_solve(&problem, &config, &SolverKind::ALL).unwrap();
            assert!(batch.best().unwrap().1 >= oracle - 1e-9);
        }
    }

    // Diagnostic harness for tuning the per-kind defaults; run with
    // `cargo test -p beamsynth --lib tuning_harness -- --ignored --nocapture`.
    #[test]
    #[ignore]
    fn tuning_harness_k12_recovery() {
        let seeds: Vec<u64> = (0..20).collect();
        let problems: Vec<IsingProblem> =
            seeds.iter().map(|&s| random_problem(12, 1000 + s, 0.3)).collect();
        let oracles: Vec<f64> =
            problems.iter().map(|p| brute_force(p).unwrap().1).collect();
        for kind in SolverKind::ALL {
            let mut hits = 0usize;
            let start = std::time::Instant::now();
            for (i, problem) in problems.iter().enumerate() {
                let config = SolverConfig { seed: seeds[i], ..Default::default() };
                let best = solve(problem, kind, &config).unwrap().best().unwrap().1;
                let tol = 1e-3 * oracles[i].abs();
                if best <= oracles[i] + tol {
                    hits += 1;
                }
            }
            println!("{kind}: {hits}/20 in {:?}", start.elapsed());
        }
    }

    #[test]
    fn best_of_batch_beats_trivial_state() {
        for seed in 0..5u64 {
            let problem = random_problem(12, 300 + seed, 0.3);
            let trivial = problem.energy(&[1i8; 12]).unwrap();
            let config = SolverConfig { seed, batch_size: 32, iterations: 500, ..Default::default() };
            for kind in SolverKind::ALL {
                let best = solve(&problem, kind, &config).unwrap().best().unwrap().1;
                assert!(best <= trivial, "{kind} seed {seed}: {best} vs {trivial}");
            }
        }
    }
}
