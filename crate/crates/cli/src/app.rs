//! Command definitions and dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qjd_core::models::{save_dense, DEFAULT_DD_SEED};
use qjd_core::solvers::PAULI_ACCOUNTING_RULE;
use serde_json::json;

use crate::config::{ExperimentConfig, HamiltonianConfig, Overrides};
use crate::error::{CliError, Result};
use crate::experiment::{build_hamiltonian, build_instance, run_methods, MethodOutcome};
use crate::output::{ensure_dir, manifest_json, write_all, write_json, write_method};
use crate::scenarios::{scenario, scenario_names};

#[derive(Debug, Parser)]
#[command(name = "qjd", version, about = "Jacobi-Davidson family eigensolver experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the Hamiltonian of a config to disk (dense binary or Pauli text) with a manifest.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run one method and write its trace and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run every method of a config on the same instance and write combined reports.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run a pinned scenario end to end.
    Reproduce {
        /// One of dd-fig2a..dd-fig2f, ising-dd, ising-nondd, water.
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Print the pinned config of a scenario as TOML.
    Show {
        scenario: String,
        #[arg(long)]
        pauli_file: Option<PathBuf>,
    },
    /// Check a Pauli Hamiltonian file: parse, Hermiticity, optional qubit count.
    Validate {
        path: PathBuf,
        #[arg(long)]
        qubits: Option<usize>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct OverrideArgs {
    /// Seed for the dd off-diagonal draw and SQDiag shot sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gaussian reference width.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Regularization δ of the shifted inverses.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Sample SQDiag selections from this many shots.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Replace the Hamiltonian by a Pauli text file.
    #[arg(long)]
    pub pauli_file: Option<PathBuf>,
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            seed: a.seed,
            sigma: a.sigma,
            delta: a.delta,
            max_iter: a.max_iter,
            shots: a.shots,
            pauli_file: a.pauli_file.clone(),
        }
    }
}

fn load_config(path: &Path, o: &OverrideArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&o.into())?;
    Ok(cfg)
}

fn write_config_echo(dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
    let path = dir.join("config.toml");
    fs::write(&path, cfg.to_toml()).map_err(|e| CliError::io(&path, e))
}

pub struct Comparison {
    pub outcomes: Vec<MethodOutcome>,
    pub exact_energy: Option<f64>,
}

/// Runs every method of `cfg` and writes the full artifact set under `out`.
pub fn compare(cfg: &ExperimentConfig, out: &Path) -> Result<Comparison> {
    let instance = build_instance(cfg)?;
    let outcomes = run_methods(&instance, cfg)?;
    write_all(out, cfg, &instance, &outcomes)?;
    write_config_echo(out, cfg)?;
    Ok(Comparison {
        outcomes,
        exact_energy: instance.exact_energy,
    })
}

pub fn run_single(cfg: &ExperimentConfig, label: &str, out: &Path) -> Result<MethodOutcome> {
    let mut cfg = cfg.clone();
    cfg.methods = vec![label.to_string()];
    cfg.validate()?;
    let instance = build_instance(&cfg)?;
    let solver = cfg.solver.solver_config(label)?;
    let outcome = crate::experiment::run_method(&instance, label, solver);
    ensure_dir(out)?;
    write_method(out, &outcome, instance.exact_energy)?;
    write_json(
        &out.join("manifest.json"),
        &manifest_json(&cfg, &instance, std::slice::from_ref(&outcome))?,
    )?;
    write_config_echo(out, &cfg)?;
    Ok(outcome)
}

pub fn generate(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    ensure_dir(out)?;
    let h = build_hamiltonian(&cfg.hamiltonian)?;
    let (file, format) = match &cfg.hamiltonian {
        HamiltonianConfig::Dd { .. } | HamiltonianConfig::DenseFile { .. } => {
            let path = out.join("hamiltonian.qjdm");
            save_dense(h.dense()?, &path)?;
            (path, "dense-binary")
        }
        HamiltonianConfig::Ising { .. } | HamiltonianConfig::PauliFile { .. } => {
            let path = out.join("hamiltonian.pauli");
            fs::write(&path, h.pauli_sum().to_text()).map_err(|e| CliError::io(&path, e))?;
            (path, "pauli-text")
        }
    };
    let seed = match &cfg.hamiltonian {
        HamiltonianConfig::Dd { seed, .. } => Some(*seed),
        _ => None,
    };
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cfg)?,
        "hamiltonian_file": file.file_name().map(|s| s.to_string_lossy().into_owned()),
        "format": format,
        "n_qubits": h.n_qubits(),
        "dim": h.dim(),
        "seed": seed,
        "default_seed": DEFAULT_DD_SEED,
        "pauli_terms": if h.is_pauli() { Some(h.pauli_term_count()) } else { None },
        "pauli_accounting_rule": PAULI_ACCOUNTING_RULE,
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    write_config_echo(out, cfg)?;
    Ok(file)
}

fn print_summary(outcomes: &[MethodOutcome]) {
    for o in outcomes {
        let iters = match &o.run {
            Ok(run) => run
                .trace
                .iterations_to_convergence()
                .map_or_else(|| format!("({} iterations)", run.trace.records.len()), |k| k.to_string()),
            Err(e) => e.clone(),
        };
        println!("{:<12} {:<20} {}", o.label, o.status(), iters);
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { config, out, overrides } => {
            let cfg = load_config(&config, &overrides)?;
            let file = generate(&cfg, &out)?;
            println!("wrote {}", file.display());
        }
        Command::Run {
            config,
            method,
            out,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let outcome = run_single(&cfg, &method, &out)?;
            print_summary(std::slice::from_ref(&outcome));
        }
        Command::Compare { config, out, overrides } => {
            let cfg = load_config(&config, &overrides)?;
            print_summary(&compare(&cfg, &out)?.outcomes);
        }
        Command::Reproduce {
            scenario: name,
            out,
            overrides,
        } => {
            let mut o: Overrides = (&overrides).into();
            let mut cfg = scenario(&name, o.pauli_file.take())?;
            cfg.apply(&o)?;
            print_summary(&compare(&cfg, &out)?.outcomes);
        }
        Command::Show { scenario: name, pauli_file } => {
            print!("{}", scenario(&name, pauli_file)?.to_toml());
        }
        Command::Validate { path, qubits } => {
            let ps = qjd_core::models::load_pauli_hamiltonian(&path)?;
            if let Some(q) = qubits {
                if ps.n_qubits() != q {
                    return Err(CliError::Config(format!(
                        "{} acts on {} qubits, expected {q}",
                        path.display(),
                        ps.n_qubits()
                    )));
                }
            }
            println!("{}: {} qubits, {} terms, Hermitian", path.display(), ps.n_qubits(), ps.len());
        }
    }
    Ok(())
}

pub fn available_scenarios() -> String {
    scenario_names().join(", ")
}
