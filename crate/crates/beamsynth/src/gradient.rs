//! Classical continuous branch: sidelobe-ratio loss with analytic
//! gradients, an Adam minimizer with box projection and best-seen
//! return, random-restart phase optimization snapped onto the case
//! grid, and amplitude-only refinement.
//!
//! The loss is sum_j w_j P(theta_j) / (blend * P(theta0)) over the same
//! sampled sidelobe angles the coupling builder uses. A zero-power
//! mainlobe maps to an infinity sentinel so optimizers are driven away
//! instead of dividing by zero.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use crate::array::element_factor_power;
use crate::cases::CaseSpec;
use crate::encoding::{build_phase_code, snap_to_grid};
use crate::error::{Error, Result};
use crate::ising::SidelobeConfig;
use crate::refine::{Candidate, CandidateSet, Provenance};

/// Adam optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub iterations: usize,
    /// Seeds the restart sampler in [`classical_branch`]; Adam itself is
    /// deterministic.
    pub seed: u64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            iterations: 500,
            seed: 0,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Config(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !b.is_finite() || !(0.0..1.0).contains(&b) || b == 0.0 {
                return Err(Error::Config(format!("{name} {b} must lie in (0, 1)")));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Precomputed per-angle terms: (pi * cos(theta), weight, element power).
/// The mainlobe entry carries weight blend^-1 handling separately.
struct LossContext {
    /// Sidelobe samples as (pi cos(theta), weight, element power).
    side: Vec<(f64, f64, f64)>,
    /// Mainlobe (pi cos(theta0), element power).
    main: (f64, f64),
    blend: f64,
}

impl LossContext {
    fn build(cfg: &SidelobeConfig) -> Result<Self> {
        cfg.validate()?;
        let samples = cfg.sample_angles()?;
        let mut side = Vec::with_capacity(samples.len());
        for (theta, w) in samples {
            side.push((PI * theta.to_radians().cos(), w, element_factor_power(theta)?));
        }
        let main = (
            PI * cfg.theta0_deg.to_radians().cos(),
            element_factor_power(cfg.theta0_deg)?,
        );
        Ok(Self { side, main, blend: cfg.blend_weight })
    }

    #[cfg(test)]
    fn from_samples(samples: &[(f64, f64)], theta0: f64, blend: f64) -> Self {
        let side = samples
            .iter()
            .map(|&(t, w)| (PI * t.to_radians().cos(), w, element_factor_power(t).unwrap()))
            .collect();
        let main = (PI * theta0.to_radians().cos(), element_factor_power(theta0).unwrap());
        Self { side, main, blend }
    }
}

/// P(theta) plus its gradients for one angle term; `pc` is pi cos(theta).
/// Gradient of P wrt beta_n is 2 E Re(conj(F) g_n) and wrt alpha_n is
/// 2 E Re(conj(F) i beta_n g_n), with g_n = exp(i(alpha_n + pc (n+1))).
fn power_terms(
    phases: &[f64],
    amps: &[f64],
    pc: f64,
    elem: f64,
    grad_a: Option<&mut [f64]>,
    grad_b: Option<&mut [f64]>,
) -> f64 {
    let mut field = Complex64::new(0.0, 0.0);
    let n = phases.len();
    let mut g = Vec::with_capacity(n);
    for k in 0..n {
        let gk = Complex64::from_polar(1.0, phases[k] + pc * (k + 1) as f64);
        field += amps[k] * gk;
        g.push(gk);
    }
    let conj = field.conj();
    if let Some(ga) = grad_a {
        for k in 0..n {
            ga[k] = 2.0 * elem * (conj * Complex64::i() * amps[k] * g[k]).re;
        }
    }
    if let Some(gb) = grad_b {
        for k in 0..n {
            gb[k] = 2.0 * elem * (conj * g[k]).re;
        }
    }
    elem * field.norm_sqr()
}

fn check_lengths(phases: &[f64], amps: &[f64]) -> Result<usize> {
    if phases.len() != amps.len() || phases.is_empty() {
        return Err(Error::Shape(format!(
            "phases and amplitudes must have equal nonzero length, got {} and {}",
            phases.len(),
            amps.len()
        )));
    }
    Ok(phases.len())
}

/// Loss value only. A zero mainlobe yields +infinity.
fn loss_value(ctx: &LossContext, phases: &[f64], amps: &[f64]) -> Result<f64> {
    let _ = check_lengths(phases, amps)?;
    let p_main = power_terms(phases, amps, ctx.main.0, ctx.main.1, None, None);
    if p_main <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut side_sum = 0.0;
    for &(pc, w, e) in &ctx.side {
        side_sum += w * power_terms(phases, amps, pc, e, None, None);
    }
    Ok(side_sum / (ctx.blend * p_main))
}

/// Loss plus analytic gradients, chain-ruled through the ratio:
/// dR = dS / (blend P_main) - R dP_main / P_main. Zero mainlobe is a
/// domain error here; soft wrappers map it back to the sentinel.
fn loss_gradients_ctx(
    ctx: &LossContext,
    phases: &[f64],
    amps: &[f64],
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let n = check_lengths(phases, amps)?;
    let mut main_ga = vec![0.0; n];
    let mut main_gb = vec![0.0; n];
    let p_main =
        power_terms(phases, amps, ctx.main.0, ctx.main.1, Some(&mut main_ga), Some(&mut main_gb));
    if p_main <= 0.0 {
        return Err(Error::Domain("zero mainlobe power".into()));
    }
    let mut side_sum = 0.0;
    let mut side_ga = vec![0.0; n];
    let mut side_gb = vec![0.0; n];
    let mut ga = vec![0.0; n];
    let mut gb = vec![0.0; n];
    for &(pc, w, e) in &ctx.side {
        let p = power_terms(phases, amps, pc, e, Some(&mut ga), Some(&mut gb));
        side_sum += w * p;
        for k in 0..n {
            side_ga[k] += w * ga[k];
            side_gb[k] += w * gb[k];
        }
    }
    let denom = ctx.blend * p_main;
    let loss = side_sum / denom;
    let mut out_a = Vec::with_capacity(n);
    let mut out_b = Vec::with_capacity(n);
    for k in 0..n {
        out_a.push(side_ga[k] / denom - loss * main_ga[k] / p_main);
        out_b.push(side_gb[k] / denom - loss * main_gb[k] / p_main);
    }
    Ok((loss, out_a, out_b))
}

/// Weighted sidelobe power over mainlobe power, sampled exactly like the
/// coupling builder. Zero mainlobe returns +infinity.
pub fn ratio_loss(phases: &[f64], amps: &[f64], cfg: &SidelobeConfig) -> Result<f64> {
    loss_value(&LossContext::build(cfg)?, phases, amps)
}

/// Analytic (d/d alpha, d/d beta) of [`ratio_loss`]. Zero mainlobe power
/// is an error; callers that optimize through it use the sentinel form.
pub fn loss_gradients(
    phases: &[f64],
    amps: &[f64],
    cfg: &SidelobeConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, ga, gb) = loss_gradients_ctx(&LossContext::build(cfg)?, phases, amps)?;
    Ok((ga, gb))
}

/// Standard Adam with bias correction over `f`, projecting every step
/// into per-dimension bounds. `f` returns (loss, gradient). Returns the
/// best-seen iterate, never a point worse than the start.
pub fn adam_minimize<F>(
    initial: &[f64],
    bounds: &[Option<(f64, f64)>],
    config: &AdamConfig,
    mut f: F,
) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    config.validate()?;
    if bounds.len() != initial.len() {
        return Err(Error::Shape(format!(
            "bounds length {} does not match parameter length {}",
            bounds.len(),
            initial.len()
        )));
    }
    let project = |x: &mut [f64]| {
        for (v, b) in x.iter_mut().zip(bounds) {
            if let Some((lo, hi)) = b {
                *v = v.clamp(*lo, *hi);
            }
        }
    };
    let mut x = initial.to_vec();
    project(&mut x);
    let d = x.len();
    let mut m = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut best_x = x.clone();
    let mut best_loss = f64::INFINITY;
    for t in 1..=config.iterations {
        let (loss, g) = f(&x)?;
        if g.len() != d {
            return Err(Error::Shape(format!("gradient length {} != {}", g.len(), d)));
        }
        if loss < best_loss {
            best_loss = loss;
            best_x.copy_from_slice(&x);
        }
        let bc1 = 1.0 - config.beta1.powi(t as i32);
        let bc2 = 1.0 - config.beta2.powi(t as i32);
        for k in 0..d {
            m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
            v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
            let mhat = m[k] / bc1;
            let vhat = v[k] / bc2;
            x[k] -= config.learning_rate * mhat / (vhat.sqrt() + config.epsilon);
        }
        project(&mut x);
    }
    let (loss, _) = f(&x)?;
    if loss < best_loss {
        best_loss = loss;
        best_x.copy_from_slice(&x);
    }
    if best_loss.is_infinite() {
        // Never improved on the start; report the (projected) start.
        best_x.copy_from_slice(&x);
        let mut start = initial.to_vec();
        project(&mut start);
        best_x.copy_from_slice(&start);
    }
    Ok((best_x, best_loss))
}

/// Sentinel-tolerant loss/gradient pair: zero mainlobe maps to infinite
/// loss with a zero gradient so Adam can coast past it on momentum.
fn soft_eval(ctx: &LossContext, phases: &[f64], amps: &[f64], d: usize) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    match loss_gradients_ctx(ctx, phases, amps) {
        Ok(v) => Ok(v),
        Err(Error::Domain(_)) => Ok((f64::INFINITY, vec![0.0; d], vec![0.0; d])),
        Err(e) => Err(e),
    }
}

/// Random-restart continuous phase optimization. Each restart samples
/// alpha uniform in [0, 2pi)^N (beta = 1, free when the case allows),
/// minimizes the ratio loss, snaps the phases onto the case's 2^bits
/// grid, re-refines amplitudes after the snap when they are free, and
/// emits a candidate with classical provenance and per-antenna spins
/// consistent with the snapped grid point. Stops early when `deadline`
/// passes; restarts use independent seeded streams.
pub fn classical_branch(
    case: &CaseSpec,
    n_antennas: usize,
    sidelobe: &SidelobeConfig,
    adam: &AdamConfig,
    n_restarts: usize,
    deadline: Option<Instant>,
) -> Result<CandidateSet> {
    case.validate()?;
    adam.validate()?;
    let ctx = LossContext::build(sidelobe)?;
    let code = build_phase_code(case.bits)?;
    let n = n_antennas;
    if n == 0 {
        return Err(Error::Config("need at least one antenna".into()));
    }
    let step = TAU / (1u32 << case.bits) as f64;
    let mut entries = Vec::new();
    for restart in 0..n_restarts {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(adam.seed);
        rng.set_stream(restart as u64);
        let alpha0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();

        let (snapped, beta): (Vec<f64>, Vec<f64>) = if case.amp_opt {
            let mut params = alpha0;
            params.extend(std::iter::repeat(1.0).take(n));
            let mut bounds = vec![None; n];
            bounds.extend(std::iter::repeat(Some((0.0, 1.0))).take(n));
            let (opt, _) = adam_minimize(&params, &bounds, adam, |p| {
                let (loss, ga, gb) = soft_eval(&ctx, &p[..n], &p[n..], n)?;
                let mut g = ga;
                g.extend(gb);
                Ok((loss, g))
            })?;
            let snapped: Vec<f64> =
                opt[..n].iter().map(|&a| snap_to_grid(a, case.bits).0).collect();
            let beta = amplitude_refine(&snapped, &opt[n..], sidelobe, adam)?;
            (snapped, beta)
        } else {
            let ones = vec![1.0; n];
            let (opt, _) = adam_minimize(&alpha0, &vec![None; n], adam, |p| {
                let (loss, ga, _) = soft_eval(&ctx, p, &ones, n)?;
                Ok((loss, ga))
            })?;
            let snapped: Vec<f64> = opt.iter().map(|&a| snap_to_grid(a, case.bits).0).collect();
            (snapped, ones)
        };

        let mut spins = Vec::with_capacity(n * code.spins_per_antenna());
        for &p in &snapped {
            let idx = (p / step).round() as u32 % (1u32 << case.bits);
            spins.extend(code.consistent_block(idx)?);
        }
        let energy = loss_value(&ctx, &snapped, &beta)?;
        entries.push(Candidate {
            spins,
            phases: snapped,
            amplitudes: beta,
            energy,
            provenance: Provenance::Classical,
        });
    }
    Ok(CandidateSet { entries })
}

/// Adam over amplitudes only, box [0, 1], phases fixed. A start with
/// infinite loss (for example beta = 0) is re-seeded at beta = 0.5.
/// The result never scores worse than the (possibly re-seeded) start.
pub fn amplitude_refine(
    phases: &[f64],
    initial: &[f64],
    sidelobe: &SidelobeConfig,
    adam: &AdamConfig,
) -> Result<Vec<f64>> {
    let n = check_lengths(phases, initial)?;
    adam.validate()?;
    let ctx = LossContext::build(sidelobe)?;
    let start: Vec<f64> = if loss_value(&ctx, phases, initial)?.is_infinite() {
        vec![0.5; n]
    } else {
        initial.to_vec()
    };
    let bounds = vec![Some((0.0, 1.0)); n];
    let (best, _) = adam_minimize(&start, &bounds, adam, |b| {
        let (loss, _, gb) = soft_eval(&ctx, phases, b, n)?;
        Ok((loss, gb))
    })?;
    Ok(best)
}
