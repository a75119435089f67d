//! CSV and JSON artifacts.
//!
//! Floats are written with `{:e}` (shortest round-trip form), so identical
//! runs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use qjd_core::solvers::{convergence_rate, PAULI_ACCOUNTING_RULE};
use qjd_core::{ConvergenceTrace, SamplingMode, SolverConfig};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiment::{Instance, MethodOutcome};

pub const TRACE_HEADER: [&str; 7] = [
    "iter",
    "ritz_value",
    "energy_error",
    "residual_norm",
    "subspace_dim",
    "cumulative_pauli_terms",
    "rejected",
];

pub const SUMMARY_HEADER: [&str; 8] = [
    "method",
    "status",
    "iterations_to_convergence",
    "iterations_run",
    "final_energy",
    "energy_error",
    "cumulative_pauli_terms",
    "subspace_dim",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// File-system-safe directory name for a label.
pub fn label_dir(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

struct CsvOut {
    path: PathBuf,
    w: csv::Writer<fs::File>,
}

impl CsvOut {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self> {
        let mut w = csv::Writer::from_path(&path).map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })?;
        w.write_record(header).map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })?;
        Ok(CsvOut { path, w })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let path = &self.path;
        self.w.write_record(fields).map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn write_trace_csv(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    let mut out = CsvOut::create(path.to_path_buf(), &TRACE_HEADER)?;
    for r in &trace.records {
        out.row([
            r.iteration.to_string(),
            fmt_f64(r.ritz_value),
            fmt_opt(r.energy_error),
            fmt_f64(r.residual_norm),
            r.subspace_dim.to_string(),
            r.cumulative_pauli_terms.to_string(),
            u8::from(r.rejected).to_string(),
        ])?;
    }
    out.finish()
}

pub fn solver_config_json(c: &SolverConfig) -> Value {
    let sqdiag = c.sqdiag_first_iteration.map(|s| {
        let mode = match s.mode {
            SamplingMode::Exact => json!({ "kind": "exact" }),
            SamplingMode::Shots { count, seed } => json!({ "kind": "shots", "count": count, "seed": seed }),
        };
        json!({ "n": s.n, "mode": mode })
    });
    json!({
        "method": format!("{:?}", c.method),
        "preconditioner": format!("{:?}", c.preconditioner),
        "use_quantum_kernels": c.use_quantum_kernels,
        "sqdiag_first_iteration": sqdiag,
        "max_iterations": c.max_iterations,
        "residual_tol": c.residual_tol,
        "energy_tol": c.energy_tol,
        "regularization": c.regularization,
        "reject_tol": c.reject_tol,
        "count_pauli_terms": c.count_pauli_terms,
    })
}

pub fn summary_json(o: &MethodOutcome, exact_energy: Option<f64>) -> Value {
    let mut v = json!({
        "method": o.label,
        "status": o.status(),
        "config": solver_config_json(&o.config),
    });
    match &o.run {
        Ok(run) => {
            let t = &run.trace;
            let final_energy = run.best.as_ref().map(|b| b.value);
            v["iterations_to_convergence"] = json!(t.iterations_to_convergence());
            v["iterations_run"] = json!(t.records.len());
            v["final_energy"] = json!(final_energy);
            v["exact_energy"] = json!(exact_energy);
            v["energy_error"] = json!(final_energy.zip(exact_energy).map(|(e, e0)| (e - e0).abs()));
            v["final_residual_norm"] = json!(t.records.last().map(|r| r.residual_norm));
            v["cumulative_pauli_terms"] = json!(t.final_pauli_terms());
            v["epsilon_fallbacks"] = json!(t.records.iter().filter(|r| r.epsilon_fallback).count());
            v["rejected_corrections"] = json!(t.records.iter().filter(|r| r.rejected).count());
            if let qjd_core::TerminalStatus::Failed(msg) = &t.status {
                v["failure"] = json!(msg);
            }
            if let Some(sq) = &t.sqdiag {
                v["sqdiag"] = json!({
                    "selected_indices": sq.selected_indices,
                    "energy": sq.energy,
                    "shortfall": sq.shortfall,
                });
            }
        }
        Err(msg) => {
            v["iterations_to_convergence"] = Value::Null;
            v["failure"] = json!(msg);
        }
    }
    v
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `<dir>/<label>/trace.csv` and `<dir>/<label>/summary.json`.
pub fn write_method(dir: &Path, o: &MethodOutcome, exact_energy: Option<f64>) -> Result<()> {
    let sub = dir.join(label_dir(&o.label));
    ensure_dir(&sub)?;
    let empty = ConvergenceTrace {
        records: Vec::new(),
        status: qjd_core::TerminalStatus::Failed(String::new()),
        sqdiag: None,
    };
    let trace = o.run.as_ref().map_or(&empty, |r| &r.trace);
    write_trace_csv(&sub.join("trace.csv"), trace)?;
    write_json(&sub.join("summary.json"), &summary_json(o, exact_energy))
}

/// Combined comparison files over all methods.
pub fn write_comparison(dir: &Path, outcomes: &[MethodOutcome], exact_energy: Option<f64>) -> Result<()> {
    let traces: Vec<(&str, &ConvergenceTrace)> = outcomes
        .iter()
        .filter_map(|o| o.run.as_ref().ok().map(|r| (o.label.as_str(), &r.trace)))
        .collect();

    let mut energy = CsvOut::create(dir.join("energy_error.csv"), &["method", "iter", "ritz_value", "energy_error"])?;
    let mut pauli = CsvOut::create(dir.join("pauli_terms.csv"), &["method", "iter", "cumulative_pauli_terms"])?;
    for (label, t) in &traces {
        for r in &t.records {
            let it = r.iteration.to_string();
            energy.row([label.to_string(), it.clone(), fmt_f64(r.ritz_value), fmt_opt(r.energy_error)])?;
            pauli.row([label.to_string(), it, r.cumulative_pauli_terms.to_string()])?;
        }
    }
    energy.finish()?;
    pauli.finish()?;

    let mut rate = CsvOut::create(dir.join("convergence_rate.csv"), &["method", "iter", "rate"])?;
    if let Some(e0) = exact_energy {
        for (label, t) in &traces {
            for (k, q) in convergence_rate(t, e0).into_iter().enumerate() {
                rate.row([label.to_string(), t.records[k + 1].iteration.to_string(), fmt_f64(q)])?;
            }
        }
    }
    rate.finish()?;

    let mut table = CsvOut::create(dir.join("table1.csv"), &SUMMARY_HEADER)?;
    for o in outcomes {
        let (itc, n, fe, err, terms, dim) = match &o.run {
            Ok(run) => {
                let t = &run.trace;
                let fe = run.best.as_ref().map(|b| b.value);
                (
                    t.iterations_to_convergence().map(|k| k.to_string()).unwrap_or_default(),
                    t.records.len().to_string(),
                    fmt_opt(fe),
                    fmt_opt(fe.zip(exact_energy).map(|(e, e0)| (e - e0).abs())),
                    t.final_pauli_terms().to_string(),
                    t.records.last().map(|r| r.subspace_dim.to_string()).unwrap_or_default(),
                )
            }
            Err(_) => Default::default(),
        };
        table.row([o.label.clone(), o.status().to_string(), itc, n, fe, err, terms, dim])?;
    }
    table.finish()
}

pub fn manifest_json(cfg: &ExperimentConfig, instance: &Instance, outcomes: &[MethodOutcome]) -> Result<Value> {
    let config = serde_json::to_value(cfg)?;
    let h = &instance.hamiltonian;
    Ok(json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "config_toml": cfg.to_toml(),
        "hamiltonian": {
            "n_qubits": h.n_qubits(),
            "dim": h.dim(),
            "representation": if h.is_pauli() { "pauli" } else { "dense" },
            "pauli_terms": if h.is_pauli() { Some(h.pauli_term_count()) } else { None },
        },
        "reference": {
            "spec": config["reference"],
            "resolved_centers": instance.resolved_centers,
        },
        "exact_energy": instance.exact_energy,
        "solvers": outcomes
            .iter()
            .map(|o| json!({ "label": o.label, "config": solver_config_json(&o.config) }))
            .collect::<Vec<_>>(),
        "pauli_accounting_rule": PAULI_ACCOUNTING_RULE,
        "pauli_accounting_enabled": cfg.solver.count_pauli_terms,
        "float_format": "shortest round-trip scientific notation",
    }))
}

pub fn write_all(dir: &Path, cfg: &ExperimentConfig, instance: &Instance, outcomes: &[MethodOutcome]) -> Result<()> {
    ensure_dir(dir)?;
    for o in outcomes {
        write_method(dir, o, instance.exact_energy)?;
    }
    write_comparison(dir, outcomes, instance.exact_energy)?;
    write_json(&dir.join("manifest.json"), &manifest_json(cfg, instance, outcomes)?)
}
