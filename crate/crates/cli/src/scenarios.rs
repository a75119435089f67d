//! Pinned configurations for the reproduction runs.

use std::path::PathBuf;

use crate::config::{ExperimentConfig, HamiltonianConfig, ReferenceConfig, SolverSettings};
use crate::error::{CliError, Result};

/// Environment variable pointing at the 10-qubit water Hamiltonian.
pub const WATER_FILE_ENV: &str = "QJD_WATER_FILE";

pub const WATER_QUBITS: usize = 10;
pub const WATER_HF_BITSTRING: &str = "0011110011";
pub const WATER_SPREAD: f64 = 0.1;

/// (name, minima positions, Gaussian centers) for the 8-qubit dd suite.
/// Positions are 1-based diagonal indices; centers are 0-based basis indices.
pub const DD_SCENARIOS: [(&str, &[usize], &[usize]); 6] = [
    ("dd-fig2a", &[1], &[0]),
    ("dd-fig2b", &[1, 256], &[0]),
    ("dd-fig2c", &[1, 128, 256], &[0]),
    ("dd-fig2d", &[1, 256], &[0, 255]),
    ("dd-fig2e", &[1, 128, 256], &[0, 127, 255]),
    ("dd-fig2f", &[1, 85, 170, 256], &[0, 84, 169, 255]),
];

pub const DD_METHODS: [&str; 6] = ["QJD", "QJD_D", "SBQJD", "SBQJD_D", "QD_residue", "QD_D"];
pub const ISING_METHODS: [&str; 7] = ["QJD", "QJD_D", "SBQJD", "SBQJD_D", "QD_residue", "QD_D", "SBQD"];
pub const WATER_METHODS: [&str; 6] = ["QJD", "QJD_D", "SBQJD", "SBQJD_D", "QD_residue", "SBQD"];

pub fn scenario_names() -> Vec<&'static str> {
    let mut names: Vec<&str> = DD_SCENARIOS.iter().map(|s| s.0).collect();
    names.extend(["ising-dd", "ising-nondd", "water"]);
    names
}

fn labels(methods: &[&str]) -> Vec<String> {
    methods.iter().map(|s| s.to_string()).collect()
}

/// The pinned config for `name`. The water scenario needs `pauli_file`,
/// falling back to `$QJD_WATER_FILE`.
pub fn scenario(name: &str, pauli_file: Option<PathBuf>) -> Result<ExperimentConfig> {
    if let Some((_, minima, centers)) = DD_SCENARIOS.iter().find(|s| s.0 == name) {
        return Ok(ExperimentConfig {
            name: name.to_string(),
            methods: labels(&DD_METHODS),
            hamiltonian: HamiltonianConfig::Dd {
                n_qubits: 8,
                minima_positions: minima.to_vec(),
                off_diag_scale: None,
                seed: qjd_core::models::DEFAULT_DD_SEED,
            },
            reference: ReferenceConfig::Gaussian {
                centers: Some(centers.to_vec()),
                sigma: 2.0,
            },
            solver: SolverSettings::default(),
            oracle: true,
        });
    }
    let ising = |g: f64| ExperimentConfig {
        name: name.to_string(),
        methods: labels(&ISING_METHODS),
        hamiltonian: HamiltonianConfig::Ising {
            n_sites: 12,
            j: 1.1,
            h: 0.9,
            g,
        },
        reference: ReferenceConfig::Gaussian { centers: None, sigma: 2.0 },
        // The full-inverse term count is a 4096-dimensional decomposition per
        // iteration; at 12 qubits that dominates everything else.
        solver: SolverSettings {
            count_pauli_terms: false,
            ..SolverSettings::default()
        },
        oracle: true,
    };
    match name {
        "ising-dd" => Ok(ising(0.01)),
        "ising-nondd" => Ok(ising(1.0)),
        "water" => {
            let path = pauli_file
                .or_else(|| std::env::var_os(WATER_FILE_ENV).map(PathBuf::from))
                .ok_or_else(|| CliError::DataRequired(water_data_message()))?;
            Ok(ExperimentConfig {
                name: name.to_string(),
                methods: labels(&WATER_METHODS),
                hamiltonian: HamiltonianConfig::PauliFile { path },
                reference: ReferenceConfig::HfSpread {
                    bitstring: WATER_HF_BITSTRING.to_string(),
                    spread: WATER_SPREAD,
                },
                solver: SolverSettings::default(),
                oracle: true,
            })
        }
        _ => Err(CliError::UnknownScenario(name.to_string(), scenario_names().join(", "))),
    }
}

pub fn water_data_message() -> String {
    format!(
        "data file required: the water scenario needs a {WATER_QUBITS}-qubit Pauli Hamiltonian \
         (STO-3G, Jordan-Wigner mapped and tapered to {WATER_QUBITS} qubits, one line `<real> <imag> <label>` per term); \
         pass --pauli-file <path> or set {WATER_FILE_ENV}. See \"Water Hamiltonian\" in the README for a recipe"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_scenario_is_valid() {
        for name in scenario_names() {
            match scenario(name, Some(PathBuf::from("w.txt"))) {
                Ok(cfg) => cfg.validate().unwrap(),
                Err(e) => panic!("{name}: {e}"),
            }
        }
    }

    #[test]
    fn unknown_scenario_lists_choices() {
        let err = scenario("dd-fig9", None).unwrap_err().to_string();
        assert!(err.contains("ising-nondd"));
    }
}
