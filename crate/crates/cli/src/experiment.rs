//! Building problem instances and running labeled methods on them.

use qjd_core::models::{build_dd_matrix, build_ising, exact_ground_pair, load_dense, load_pauli_hamiltonian};
use qjd_core::solvers::run_solver;
use qjd_core::state::{basis_state, gaussian_reference, hf_spread_reference, GaussianRefSpec};
use qjd_core::{DdMatrixSpec, Hamiltonian, IsingSpec, SolverConfig, SolverRun, StateVector};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, HamiltonianConfig, ReferenceConfig};
use crate::error::{CliError, Result};

/// Environment variable capping the number of methods run in parallel.
pub const NUM_THREADS_ENV: &str = "QJD_NUM_THREADS";

pub struct Instance {
    pub hamiltonian: Hamiltonian,
    pub reference: StateVector,
    /// Gaussian centers after resolving a default, for the manifest.
    pub resolved_centers: Option<Vec<usize>>,
    pub exact_energy: Option<f64>,
}

pub fn build_hamiltonian(cfg: &HamiltonianConfig) -> Result<Hamiltonian> {
    Ok(match cfg {
        HamiltonianConfig::Dd {
            n_qubits,
            minima_positions,
            off_diag_scale,
            seed,
        } => {
            let mut spec = DdMatrixSpec::new(*n_qubits, minima_positions.clone());
            if let Some(s) = off_diag_scale {
                spec.off_diag_scale = *s;
            }
            spec.seed = *seed;
            Hamiltonian::from_dense(build_dd_matrix(&spec)?)
        }
        HamiltonianConfig::Ising { n_sites, j, h, g } => Hamiltonian::from_pauli(build_ising(&IsingSpec {
            n_sites: *n_sites,
            j: *j,
            h: *h,
            g: *g,
        })?)?,
        HamiltonianConfig::PauliFile { path } => Hamiltonian::from_pauli(load_pauli_hamiltonian(path)?)?,
        HamiltonianConfig::DenseFile { path } => Hamiltonian::from_dense(load_dense(path)?),
    })
}

/// Lowest diagonal entry, lowest index on ties.
pub fn diagonal_argmin(h: &Hamiltonian) -> usize {
    let d = h.diagonal();
    (0..d.len()).fold(0, |best, i| if d[i] < d[best] { i } else { best })
}

pub fn build_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    let hamiltonian = build_hamiltonian(&cfg.hamiltonian)?;
    let n = hamiltonian.n_qubits();
    let mut resolved_centers = None;
    let reference = match &cfg.reference {
        ReferenceConfig::Gaussian { centers, sigma } => {
            let centers = centers.clone().unwrap_or_else(|| vec![diagonal_argmin(&hamiltonian)]);
            resolved_centers = Some(centers.clone());
            gaussian_reference(&GaussianRefSpec {
                n_qubits: n,
                centers,
                sigma: *sigma,
            })?
        }
        ReferenceConfig::HfSpread { bitstring, spread } => hf_spread_reference(bitstring, *spread)?,
        ReferenceConfig::Basis { index } => basis_state(*index, n)?,
    };
    if reference.n_qubits() != n {
        return Err(CliError::Config(format!(
            "reference has {} qubits but the Hamiltonian has {n}",
            reference.n_qubits()
        )));
    }
    let exact_energy = if cfg.oracle {
        Some(exact_ground_pair(&hamiltonian)?.0)
    } else {
        None
    };
    Ok(Instance {
        hamiltonian,
        reference,
        resolved_centers,
        exact_energy,
    })
}

pub struct MethodOutcome {
    pub label: String,
    pub config: SolverConfig,
    /// `Err` holds the message of a solver error that ended the run before any trace.
    pub run: std::result::Result<SolverRun, String>,
}

impl MethodOutcome {
    pub fn status(&self) -> &str {
        match &self.run {
            Ok(run) => run.trace.status.as_str(),
            Err(_) => "failed",
        }
    }
}

pub fn run_method(instance: &Instance, label: &str, config: SolverConfig) -> MethodOutcome {
    let run = run_solver(&instance.hamiltonian, &instance.reference, &config, instance.exact_energy)
        .map_err(|e| e.to_string());
    MethodOutcome {
        label: label.to_string(),
        config,
        run,
    }
}

pub fn thread_count() -> Option<usize> {
    std::env::var(NUM_THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every label in `cfg.methods`, in parallel, and returns outcomes in label order.
pub fn run_methods(instance: &Instance, cfg: &ExperimentConfig) -> Result<Vec<MethodOutcome>> {
    let configs = cfg
        .methods
        .iter()
        .map(|l| Ok((l.as_str(), cfg.solver.solver_config(l)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::ThreadPool(e.to_string()))?;
    Ok(pool.install(|| {
        configs
            .into_par_iter()
            .map(|(label, config)| run_method(instance, label, config))
            .collect()
    }))
}
