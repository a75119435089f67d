//! Solver configuration, the Davidson-type outer loop, and convergence traces.

mod correction;
mod newton;

pub use correction::{
    diagonal_inverse, diagonal_inverse_term_count, jd_correction_diag, jd_correction_full, qd_correction,
    regularize_gap, shifted_inverse_apply, shifted_inverse_apply_with, shifted_inverse_matrix,
    shifted_inverse_term_count, Correction, EvaluationMode, PreconditionerKind, DEFAULT_REGULARIZATION,
    EPSILON_DENOMINATOR_TOL,
};
pub use newton::{gateaux_rayleigh_differential, solve_correction_projected, ProjectedSolution, MAX_NEWTON_DIM};

use std::fmt;
use std::str::FromStr;

use crate::error::{QjdError, Result};
use crate::operator::Hamiltonian;
use crate::sqdiag::{sqdiag_refine, SamplingMode};
use crate::state::StateVector;
use crate::subspace::{
    check_convergence, gram_schmidt_append, ConvergenceCriteria, ConvergenceStatus, ProjectedProblem, RitzPair,
    Subspace, DEFAULT_REJECT_TOL,
};
use crate::vecops;

/// Default SQDiag basis count for the `SB` prefix.
pub const DEFAULT_SQDIAG_N: usize = 3;

/// Accounting rule for the cumulative Pauli-term series.
pub const PAULI_ACCOUNTING_RULE: &str = "per iteration, add the count of Pauli terms (|c| > 1e-12) of every operator \
evaluated through quantum kernels in that iteration: QJD full preconditioner adds the regularized shifted inverse \
once per correction; QJD diagonal adds the diagonal inverse twice per correction (numerator and denominator); \
QD adds the Hamiltonian every iteration (Ritz energy) plus the preconditioner once per correction for QD_D (diagonal \
inverse) and QD (regularized shifted inverse); JD adds nothing";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Jacobi–Davidson with classical linear algebra.
    Jd,
    /// Jacobi–Davidson with ε and corrections from quantum kernels.
    Qjd,
    /// Davidson-style baseline without the ε projection.
    Qd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqdiagSettings {
    pub n: usize,
    pub mode: SamplingMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub preconditioner: PreconditionerKind,
    /// Only meaningful for [`Method::Qjd`].
    pub use_quantum_kernels: bool,
    pub sqdiag_first_iteration: Option<SqdiagSettings>,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub energy_tol: f64,
    pub regularization: f64,
    pub reject_tol: f64,
    /// Off skips the per-iteration decompositions behind the Pauli-term series.
    pub count_pauli_terms: bool,
}

impl SolverConfig {
    pub fn new(method: Method, preconditioner: PreconditionerKind) -> Self {
        let criteria = ConvergenceCriteria::default();
        SolverConfig {
            method,
            preconditioner,
            use_quantum_kernels: false,
            sqdiag_first_iteration: None,
            max_iterations: 200,
            residual_tol: criteria.residual_tol,
            energy_tol: criteria.energy_tol,
            regularization: DEFAULT_REGULARIZATION,
            reject_tol: DEFAULT_REJECT_TOL,
            count_pauli_terms: true,
        }
    }

    /// Config for a display label such as `QJD`, `SBQJD_D`, `QD_residue`, `SBQD` or `JD`.
    pub fn from_label(label: &str) -> Result<Self> {
        let label: MethodLabel = label.parse()?;
        let mut cfg = SolverConfig::new(label.method, label.preconditioner);
        if label.sqdiag {
            cfg.sqdiag_first_iteration = Some(SqdiagSettings {
                n: DEFAULT_SQDIAG_N,
                mode: SamplingMode::Exact,
            });
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(QjdError::Validation("max_iterations must be at least 1".into()));
        }
        for (name, v) in [
            ("residual_tol", self.residual_tol),
            ("energy_tol", self.energy_tol),
            ("regularization", self.regularization),
            ("reject_tol", self.reject_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QjdError::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(sb) = &self.sqdiag_first_iteration {
            if sb.n == 0 {
                return Err(QjdError::Validation("SQDiag basis count must be positive".into()));
            }
        }
        Ok(())
    }

    fn evaluation_mode(&self) -> EvaluationMode {
        if self.method == Method::Qjd && self.use_quantum_kernels {
            EvaluationMode::Kernels
        } else {
            EvaluationMode::Direct
        }
    }
}

/// Parsed display label: optional `SB` prefix, method, preconditioner suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodLabel {
    pub sqdiag: bool,
    pub method: Method,
    pub preconditioner: PreconditionerKind,
}

impl FromStr for MethodLabel {
    type Err = QjdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || QjdError::Validation(format!("unknown method label {s:?}"));
        let (sqdiag, rest) = match s.strip_prefix("SB") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (method, suffix) = if let Some(x) = rest.strip_prefix("QJD") {
            (Method::Qjd, x)
        } else if let Some(x) = rest.strip_prefix("JD") {
            (Method::Jd, x)
        } else if let Some(x) = rest.strip_prefix("QD") {
            (Method::Qd, x)
        } else {
            return Err(bad());
        };
        let preconditioner = match suffix {
            // SBQD is the SQDiag-boosted form of the canonical residue baseline.
            "" if sqdiag && method == Method::Qd => PreconditionerKind::ResidueIdentity,
            "" => PreconditionerKind::FullShiftedInverse,
            "_D" => PreconditionerKind::DiagonalShiftedInverse,
            "_residue" => PreconditionerKind::ResidueIdentity,
            _ => return Err(bad()),
        };
        Ok(MethodLabel {
            sqdiag,
            method,
            preconditioner,
        })
    }
}

impl fmt::Display for MethodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.sqdiag { "SB" } else { "" };
        let method = match self.method {
            Method::Jd => "JD",
            Method::Qjd => "QJD",
            Method::Qd => "QD",
        };
        let suffix = match (self.preconditioner, self.sqdiag, self.method) {
            (PreconditionerKind::ResidueIdentity, true, Method::Qd) => "",
            (PreconditionerKind::FullShiftedInverse, ..) => "",
            (PreconditionerKind::DiagonalShiftedInverse, ..) => "_D",
            (PreconditionerKind::ResidueIdentity, ..) => "_residue",
        };
        write!(f, "{prefix}{method}{suffix}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based; the SQDiag refinement happens before iteration 1.
    pub iteration: usize,
    pub ritz_value: f64,
    pub energy_error: Option<f64>,
    pub residual_norm: f64,
    pub subspace_dim: usize,
    pub cumulative_pauli_terms: u64,
    /// The correction computed in this iteration was rejected by Gram–Schmidt.
    pub rejected: bool,
    /// ε was ill-conditioned and the residual was used as the correction.
    pub epsilon_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TerminalStatus {
    ConvergedResidual,
    ConvergedEnergy,
    Stagnated,
    MaxIterations,
    /// A numeric or capacity failure inside the loop.
    Failed(String),
}

impl TerminalStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, TerminalStatus::ConvergedResidual | TerminalStatus::ConvergedEnergy)
    }

    pub fn as_str(&self) -> &str {
        match self {
            TerminalStatus::ConvergedResidual => "converged_residual",
            TerminalStatus::ConvergedEnergy => "converged_energy",
            TerminalStatus::Stagnated => "stagnated",
            TerminalStatus::MaxIterations => "max_iterations",
            TerminalStatus::Failed(_) => "failed",
        }
    }
}

/// Record of the optional first-iteration SQDiag refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct SqdiagEvent {
    pub selected_indices: Vec<usize>,
    pub energy: f64,
    pub shortfall: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub status: TerminalStatus,
    pub sqdiag: Option<SqdiagEvent>,
}

impl ConvergenceTrace {
    /// Iteration at which a convergence criterion fired.
    pub fn iterations_to_convergence(&self) -> Option<usize> {
        if self.status.is_converged() {
            self.records.last().map(|r| r.iteration)
        } else {
            None
        }
    }

    pub fn ritz_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ritz_value).collect()
    }

    pub fn final_pauli_terms(&self) -> u64 {
        self.records.last().map_or(0, |r| r.cumulative_pauli_terms)
    }
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    /// Lowest Ritz pair seen over the run.
    pub best: Option<RitzPair>,
    pub trace: ConvergenceTrace,
}

/// `|Eᵢ − E₀| / |Eᵢ₋₁ − E₀|` for `i ≥ 2`, with 0 where the denominator is below `1e-15`.
pub fn convergence_rate(trace: &ConvergenceTrace, e0: f64) -> Vec<f64> {
    convergence_rate_from_values(&trace.ritz_values(), e0)
}

pub fn convergence_rate_from_values(values: &[f64], e0: f64) -> Vec<f64> {
    values
        .windows(2)
        .map(|w| {
            let den = (w[0] - e0).abs();
            if den < 1e-15 {
                0.0
            } else {
                (w[1] - e0).abs() / den
            }
        })
        .collect()
}

struct StepCost {
    terms: u64,
}

fn correction_step(
    h: &Hamiltonian,
    config: &SolverConfig,
    pair: &RitzPair,
    r: &[num_complex::Complex64],
) -> Result<(Correction, bool, StepCost)> {
    let delta = config.regularization;
    let mode = config.evaluation_mode();
    let computed = match config.method {
        Method::Jd | Method::Qjd => match config.preconditioner {
            PreconditionerKind::FullShiftedInverse => jd_correction_full(h, pair, r, delta, mode),
            PreconditionerKind::DiagonalShiftedInverse => jd_correction_diag(h, pair, r, delta, mode),
            PreconditionerKind::ResidueIdentity => qd_correction(h, pair, r, PreconditionerKind::ResidueIdentity, delta),
        },
        Method::Qd => qd_correction(h, pair, r, config.preconditioner, delta),
    };
    let (correction, fallback) = match computed {
        Ok(c) => (c, false),
        Err(QjdError::IllConditionedEpsilon { .. }) => (
            Correction {
                t: r.to_vec(),
                epsilon: None,
                operator_terms: None,
            },
            true,
        ),
        Err(e) => return Err(e),
    };
    let mut terms = 0u64;
    if config.count_pauli_terms && config.method != Method::Jd {
        let count_full = || -> Result<u64> {
            Ok(match correction.operator_terms {
                Some(n) => n as u64,
                None => shifted_inverse_term_count(h, pair.value, delta)? as u64,
            })
        };
        let count_diag = || -> Result<u64> {
            Ok(match correction.operator_terms {
                Some(n) => n as u64,
                None => diagonal_inverse_term_count(h, pair.value, delta)? as u64,
            })
        };
        terms = match (config.method, config.preconditioner) {
            (Method::Qjd, PreconditionerKind::FullShiftedInverse) => count_full()?,
            (Method::Qjd, PreconditionerKind::DiagonalShiftedInverse) => 2 * count_diag()?,
            (Method::Qd, PreconditionerKind::FullShiftedInverse) => count_full()?,
            (Method::Qd, PreconditionerKind::DiagonalShiftedInverse) => count_diag()?,
            _ => 0,
        };
    }
    Ok((correction, fallback, StepCost { terms }))
}

/// Runs one solver from `reference`.
///
/// Only invalid inputs produce `Err`; failures inside the loop end the trace
/// with [`TerminalStatus::Failed`].
pub fn run_solver(
    h: &Hamiltonian,
    reference: &StateVector,
    config: &SolverConfig,
    oracle_e0: Option<f64>,
) -> Result<SolverRun> {
    config.validate()?;
    if reference.n_qubits() != h.n_qubits() {
        return Err(QjdError::Shape(format!(
            "reference has {} qubits, Hamiltonian has {}",
            reference.n_qubits(),
            h.n_qubits()
        )));
    }
    let mut records = Vec::new();
    let mut best: Option<RitzPair> = None;
    let finish = |records, status, sqdiag, best| {
        Ok(SolverRun {
            best,
            trace: ConvergenceTrace { records, status, sqdiag },
        })
    };

    let mut sqdiag = None;
    let start = match &config.sqdiag_first_iteration {
        Some(sb) => match sqdiag_refine(h, reference, sb.n, sb.mode) {
            Ok(out) => {
                sqdiag = Some(SqdiagEvent {
                    selected_indices: out.selected_indices,
                    energy: out.energy,
                    shortfall: out.shortfall,
                });
                out.refined_state
            }
            Err(e) => return finish(records, TerminalStatus::Failed(e.to_string()), None, best),
        },
        None => reference.clone(),
    };

    let criteria = ConvergenceCriteria {
        residual_tol: config.residual_tol,
        energy_tol: config.energy_tol,
    };
    let h_terms = if config.count_pauli_terms && config.method == Method::Qd {
        h.pauli_term_count() as u64
    } else {
        0
    };
    let mut subspace = Subspace::from_state(&start);
    let mut projected = ProjectedProblem::new();
    let mut cumulative = 0u64;

    for iteration in 1..=config.max_iterations {
        let step = projected.sync(h, &subspace).and_then(|_| projected.lowest(&subspace));
        let (pair, r) = match step {
            Ok(x) => x,
            Err(e) => return finish(records, TerminalStatus::Failed(e.to_string()), sqdiag, best),
        };
        let residual_norm = vecops::norm(&r);
        if best.as_ref().is_none_or(|b| pair.value < b.value) {
            best = Some(pair.clone());
        }
        cumulative += h_terms;
        let mut record = IterationRecord {
            iteration,
            ritz_value: pair.value,
            energy_error: oracle_e0.map(|e0| (pair.value - e0).abs()),
            residual_norm,
            subspace_dim: subspace.dim(),
            cumulative_pauli_terms: cumulative,
            rejected: false,
            epsilon_fallback: false,
        };
        let status = check_convergence(residual_norm, &pair, oracle_e0, &criteria);
        if status.is_converged() {
            records.push(record);
            let terminal = match status {
                ConvergenceStatus::ConvergedEnergy => TerminalStatus::ConvergedEnergy,
                _ => TerminalStatus::ConvergedResidual,
            };
            return finish(records, terminal, sqdiag, best);
        }
        if iteration == config.max_iterations {
            records.push(record);
            break;
        }
        let (correction, fallback, cost) = match correction_step(h, config, &pair, &r) {
            Ok(x) => x,
            Err(e) => {
                records.push(record);
                return finish(records, TerminalStatus::Failed(e.to_string()), sqdiag, best);
            }
        };
        cumulative += cost.terms;
        record.cumulative_pauli_terms = cumulative;
        record.epsilon_fallback = fallback;
        match gram_schmidt_append(&mut subspace, &correction.t, config.reject_tol) {
            Ok(outcome) if outcome.is_rejected() => {
                record.rejected = true;
                records.push(record);
                return finish(records, TerminalStatus::Stagnated, sqdiag, best);
            }
            Ok(_) => records.push(record),
            Err(e) => {
                records.push(record);
                return finish(records, TerminalStatus::Failed(e.to_string()), sqdiag, best);
            }
        }
    }
    finish(records, TerminalStatus::MaxIterations, sqdiag, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseHermitian;
    use crate::state::basis_state;

    #[test]
    fn label_round_trip() {
        for label in ["QJD", "QJD_D", "SBQJD", "SBQJD_D", "QD", "QD_D", "QD_residue", "SBQD", "JD", "JD_D"] {
            let parsed: MethodLabel = label.parse().unwrap();
            assert_eq!(parsed.to_string(), label);
        }
        let sbqd: MethodLabel = "SBQD".parse().unwrap();
        assert_eq!(sbqd.preconditioner, PreconditionerKind::ResidueIdentity);
        let qd: MethodLabel = "QD".parse().unwrap();
        assert_eq!(qd.preconditioner, PreconditionerKind::FullShiftedInverse);
        assert!("QJDX".parse::<MethodLabel>().is_err());
        assert!("XYZ".parse::<MethodLabel>().is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(convergence_rate_from_values(&[2.0, 2.0, 2.0], 1.0), vec![1.0, 1.0]);
        let geo: Vec<f64> = (1..6).map(|i| 1.0 + 0.5f64.powi(i)).collect();
        for r in convergence_rate_from_values(&geo, 1.0) {
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert_eq!(convergence_rate_from_values(&[1.5, 1.0, 1.0], 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn diagonal_h_with_exact_reference() {
        let h = Hamiltonian::from_dense(DenseHermitian::from_diagonal(&[3.0, 1.0, 2.0, 5.0]).unwrap());
        let run = run_solver(&h, &basis_state(1, 2).unwrap(), &SolverConfig::from_label("QJD").unwrap(), None).unwrap();
        assert_eq!(run.trace.records.len(), 1);
        assert!(run.trace.status.is_converged());
        assert_eq!(run.best.unwrap().value, 1.0);
    }

    #[test]
    fn qd_full_stagnates() {
        let h = Hamiltonian::from_dense(
            DenseHermitian::from_real_rows(&[
                vec![1.0, 0.1, 0.0, 0.0],
                vec![0.1, 2.0, 0.1, 0.0],
                vec![0.0, 0.1, 3.0, 0.1],
                vec![0.0, 0.0, 0.1, 4.0],
            ])
            .unwrap(),
        );
        let run = run_solver(&h, &basis_state(0, 2).unwrap(), &SolverConfig::from_label("QD").unwrap(), None).unwrap();
        assert_eq!(run.trace.status, TerminalStatus::Stagnated);
        assert!(run.trace.records.last().unwrap().rejected);
    }

    #[test]
    fn rejects_bad_config() {
        let h = Hamiltonian::from_dense(DenseHermitian::from_diagonal(&[1.0, 2.0]).unwrap());
        let mut cfg = SolverConfig::from_label("QJD").unwrap();
        cfg.max_iterations = 0;
        assert!(run_solver(&h, &basis_state(0, 1).unwrap(), &cfg, None).is_err());
        let cfg = SolverConfig::from_label("QJD").unwrap();
        assert!(run_solver(&h, &basis_state(0, 2).unwrap(), &cfg, None).is_err());
    }
}
