//! Run-wide configuration: the wall-clock budget and its per-stage
//! split, branch toggles, nested module configs, and a stable
//! fingerprint of all active parameters for result traceability.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gradient::AdamConfig;
use crate::ising::{SidelobeConfig, SidelobeParams};
use crate::solvers::{SolverConfig, SolverKind};

/// Fractions of the case budget assigned to each stage. The remainder
/// after the listed stages is slack for serialization and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSplit {
    /// Phase-problem annealing (stage 2).
    pub phase_solve: f64,
    /// Per-candidate amplitude annealing (stage 4).
    pub quantum_amplitude: f64,
    /// Gradient-descent branch (stage 5).
    pub gradient_branch: f64,
    /// Refinement and full-grid pool evaluation (stages 3 and 6).
    pub refine_eval: f64,
}

impl Default for BudgetSplit {
    fn default() -> Self {
        Self {
            phase_solve: 0.5,
            quantum_amplitude: 0.2,
            gradient_branch: 0.15,
            refine_eval: 0.15,
        }
    }
}

impl BudgetSplit {
    pub fn validate(&self) -> Result<()> {
        let parts = [
            ("phase_solve", self.phase_solve),
            ("quantum_amplitude", self.quantum_amplitude),
            ("gradient_branch", self.gradient_branch),
            ("refine_eval", self.refine_eval),
        ];
        for (name, f) in parts {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::Config(format!("split fraction {name} = {f} must be >= 0")));
            }
        }
        let sum: f64 = parts.iter().map(|(_, f)| f).sum();
        if sum > 1.0 + 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum} > 1")));
        }
        Ok(())
    }
}

fn default_true() -> bool {
    true
}

fn default_amp_solver() -> SolverConfig {
    // Amplitude problems are tiny (amp_bits + 1 spins), so a reduced
    // batch keeps stage 4 cheap across many candidates.
    SolverConfig { batch_size: 16, iterations: 300, ..Default::default() }
}

fn default_solver_kinds() -> Vec<SolverKind> {
    SolverKind::ALL.to_vec()
}

/// Everything a batch run needs besides the cases themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Per-case wall-clock budget in seconds.
    pub budget_seconds: f64,
    pub split: BudgetSplit,
    /// Array size N.
    pub n_antennas: usize,
    /// Mixed with each case's seed to derive per-case streams.
    pub master_seed: u64,
    /// Cluster count m for candidate refinement.
    pub refine_m: usize,
    /// Maximum excitations scored on the full grid per case.
    pub pool_cap: usize,
    /// Bits of the geometric amplitude code.
    pub amp_bits: usize,
    /// Random restarts of the gradient branch.
    pub classical_restarts: usize,
    /// Ablation switch for the annealing branch.
    #[serde(default = "default_true")]
    pub quantum_enabled: bool,
    /// Ablation switch for the gradient branch.
    #[serde(default = "default_true")]
    pub classical_enabled: bool,
    /// Which dynamics run in the multi-solver sweep.
    #[serde(default = "default_solver_kinds")]
    pub solver_kinds: Vec<SolverKind>,
    pub solver: SolverConfig,
    /// Reduced-size solver settings for amplitude subproblems.
    #[serde(default = "default_amp_solver")]
    pub amp_solver: SolverConfig,
    pub adam: AdamConfig,
    pub sidelobe: SidelobeParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            budget_seconds: 90.0,
            split: BudgetSplit::default(),
            n_antennas: 32,
            master_seed: 0,
            refine_m: 8,
            pool_cap: 64,
            amp_bits: 4,
            classical_restarts: 4,
            quantum_enabled: true,
            classical_enabled: true,
            solver_kinds: default_solver_kinds(),
            solver: SolverConfig::default(),
            amp_solver: default_amp_solver(),
            adam: AdamConfig::default(),
            sidelobe: SidelobeParams::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.budget_seconds.is_finite() || self.budget_seconds <= 0.0 {
            return Err(Error::Config(format!(
                "budget_seconds {} must be positive",
                self.budget_seconds
            )));
        }
        self.split.validate()?;
        if self.n_antennas == 0 {
            return Err(Error::Config("n_antennas must be at least 1".into()));
        }
        if self.refine_m == 0 {
            return Err(Error::Config("refine_m must be at least 1".into()));
        }
        if self.pool_cap == 0 {
            return Err(Error::Config("pool_cap must be at least 1".into()));
        }
        if !(1..=32).contains(&self.amp_bits) {
            return Err(Error::Config(format!("amp_bits {} outside 1..=32", self.amp_bits)));
        }
        if self.quantum_enabled && self.solver_kinds.is_empty() {
            return Err(Error::Config(
                "solver_kinds must not be empty while the annealing branch is enabled".into(),
            ));
        }
        self.solver.validate()?;
        self.amp_solver.validate()?;
        self.adam.validate()?;
        // Sidelobe params only validate against a target; 90 degrees is
        // representative since the checks are target-independent.
        SidelobeConfig::for_target(90.0, &self.sidelobe).validate()?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// SHA-256 over the canonical JSON form of every active parameter;
    /// stamped into each result so scores are traceable to settings.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialization cannot fail");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
