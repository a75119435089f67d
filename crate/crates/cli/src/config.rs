//! Experiment configuration, read from TOML.
//!
//! ```toml
//! name = "ising-small"
//! methods = ["QJD", "SBQJD", "QD_residue"]
//! hamiltonian.kind = "ising"
//! hamiltonian.n_sites = 6
//! hamiltonian.J = 1.1
//! hamiltonian.h = 0.9
//! hamiltonian.g = 0.5
//! reference.kind = "gaussian"
//! reference.sigma = 2.0
//! solver.max_iterations = 100
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use qjd_core::models::DEFAULT_DD_SEED;
use qjd_core::solvers::{SqdiagSettings, DEFAULT_REGULARIZATION, DEFAULT_SQDIAG_N};
use qjd_core::state::DEFAULT_SIGMA;
use qjd_core::subspace::{ConvergenceCriteria, DEFAULT_REJECT_TOL};
use qjd_core::{MethodLabel, SamplingMode, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub methods: Vec<String>,
    pub hamiltonian: HamiltonianConfig,
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Compute the exact ground energy for energy errors and the energy criterion.
    #[serde(default = "default_true")]
    pub oracle: bool,
}

fn default_true() -> bool {
    true
}

fn default_seed() -> u64 {
    DEFAULT_DD_SEED
}

fn default_sigma() -> f64 {
    DEFAULT_SIGMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HamiltonianConfig {
    /// Seeded diagonally dominant matrix.
    Dd {
        n_qubits: usize,
        minima_positions: Vec<usize>,
        /// Defaults to `2^-n_qubits`.
        #[serde(default)]
        off_diag_scale: Option<f64>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Periodic transverse-field Ising chain.
    Ising {
        n_sites: usize,
        #[serde(rename = "J")]
        j: f64,
        h: f64,
        g: f64,
    },
    /// `<real> <imag> <label>` text file.
    PauliFile { path: PathBuf },
    /// `QJDM` dense binary file.
    DenseFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReferenceConfig {
    /// Sum of Gaussians over basis indices; without `centers`, one peak at the
    /// smallest diagonal entry of `H`.
    Gaussian {
        #[serde(default)]
        centers: Option<Vec<usize>>,
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// A bitstring with `spread` of its probability moved to its index neighbours.
    HfSpread { bitstring: String, spread: f64 },
    Basis { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub energy_tol: f64,
    pub regularization: f64,
    pub reject_tol: f64,
    pub sqdiag_n: usize,
    /// Sample the SQDiag selection from this many shots instead of exact probabilities.
    pub shots: Option<u64>,
    pub shots_seed: u64,
    pub use_quantum_kernels: bool,
    pub count_pauli_terms: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let criteria = ConvergenceCriteria::default();
        SolverSettings {
            max_iterations: 200,
            residual_tol: criteria.residual_tol,
            energy_tol: criteria.energy_tol,
            regularization: DEFAULT_REGULARIZATION,
            reject_tol: DEFAULT_REJECT_TOL,
            sqdiag_n: DEFAULT_SQDIAG_N,
            shots: None,
            shots_seed: DEFAULT_DD_SEED,
            use_quantum_kernels: false,
            count_pauli_terms: true,
        }
    }
}

impl SolverSettings {
    pub fn solver_config(&self, label: &str) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::from_label(label)?;
        cfg.max_iterations = self.max_iterations;
        cfg.residual_tol = self.residual_tol;
        cfg.energy_tol = self.energy_tol;
        cfg.regularization = self.regularization;
        cfg.reject_tol = self.reject_tol;
        cfg.use_quantum_kernels = self.use_quantum_kernels;
        cfg.count_pauli_terms = self.count_pauli_terms;
        if cfg.sqdiag_first_iteration.is_some() {
            let mode = match self.shots {
                Some(count) => SamplingMode::Shots {
                    count,
                    seed: self.shots_seed,
                },
                None => SamplingMode::Exact,
            };
            cfg.sqdiag_first_iteration = Some(SqdiagSettings { n: self.sqdiag_n, mode });
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub max_iter: Option<usize>,
    pub shots: Option<u64>,
    pub pauli_file: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative file paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        match &mut cfg.hamiltonian {
            HamiltonianConfig::PauliFile { path } | HamiltonianConfig::DenseFile { path } if path.is_relative() => {
                *path = base.join(&*path);
            }
            _ => {}
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(CliError::Config("at least one method label is required".into()));
        }
        let mut seen = HashSet::new();
        for label in &self.methods {
            if !seen.insert(label) {
                return Err(CliError::Config(format!("duplicate method label {label:?}")));
            }
            label.parse::<MethodLabel>()?;
            self.solver.solver_config(label)?;
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            if let HamiltonianConfig::Dd { seed: s, .. } = &mut self.hamiltonian {
                *s = seed;
            }
            self.solver.shots_seed = seed;
        }
        if let Some(sigma) = o.sigma {
            match &mut self.reference {
                ReferenceConfig::Gaussian { sigma: s, .. } => *s = sigma,
                _ => return Err(CliError::Config("--sigma applies only to Gaussian references".into())),
            }
        }
        if let Some(delta) = o.delta {
            self.solver.regularization = delta;
        }
        if let Some(n) = o.max_iter {
            self.solver.max_iterations = n;
        }
        if let Some(shots) = o.shots {
            self.solver.shots = Some(shots);
        }
        if let Some(path) = &o.pauli_file {
            self.hamiltonian = HamiltonianConfig::PauliFile { path: path.clone() };
        }
        self.validate()
    }
}
