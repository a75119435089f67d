//! Correction vectors for the JD/QJD and QD families.

use num_complex::Complex64;

use crate::dense::DenseHermitian;
use crate::error::{QjdError, Result};
use crate::kernels::{expectation_sum, lcu_apply, overlap_sum};
use crate::linalg::HermitianEigen;
use crate::operator::Hamiltonian;
use crate::pauli::{decompose_diagonal, decompose_hermitian, decomposition_term_count, pauli_term_count, PauliString, PauliSum, DEFAULT_DROP_TOL};
use crate::state::StateVector;
use crate::subspace::RitzPair;
use crate::vecops;

pub const DEFAULT_REGULARIZATION: f64 = 1e-8;

/// Denominators of ε below this magnitude are treated as singular.
pub const EPSILON_DENOMINATOR_TOL: f64 = 1e-14;

/// Replaces gaps smaller than `delta` by `±delta` (sign of the gap, `+` at zero).
pub fn regularize_gap(gap: f64, delta: f64) -> f64 {
    if gap.abs() < delta {
        if gap < 0.0 {
            -delta
        } else {
            delta
        }
    } else {
        gap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMode {
    /// Dense linear algebra.
    Direct,
    /// Expectation values, Hadamard tests and LCU on the exact statevector.
    Kernels,
}

#[derive(Debug, Clone)]
pub struct Correction {
    pub t: Vec<Complex64>,
    pub epsilon: Option<f64>,
    /// Terms in the decomposed operator when the kernel path built it.
    pub operator_terms: Option<usize>,
}

/// Regularized `(H − E′I)⁻¹ x` from a precomputed spectrum.
pub fn shifted_inverse_apply_with(spec: &HermitianEigen, shift: f64, x: &[Complex64], delta: f64) -> Vec<Complex64> {
    spec.apply_fn(|l| 1.0 / regularize_gap(l - shift, delta), x)
}

/// Regularized `(H − E′I)⁻¹ x`; the spectrum of `H` is computed once and cached.
pub fn shifted_inverse_apply(h: &Hamiltonian, shift: f64, x: &[Complex64], delta: f64) -> Result<Vec<Complex64>> {
    Ok(shifted_inverse_apply_with(h.spectrum()?, shift, x, delta))
}

/// Dense regularized shifted inverse.
pub fn shifted_inverse_matrix(h: &Hamiltonian, shift: f64, delta: f64) -> Result<DenseHermitian> {
    let spec = h.spectrum()?;
    let data = spec.fn_matrix(|l| 1.0 / regularize_gap(l - shift, delta));
    Ok(DenseHermitian::from_parts(h.dim(), data))
}

/// Pauli terms in the decomposition of the regularized shifted inverse.
pub fn shifted_inverse_term_count(h: &Hamiltonian, shift: f64, delta: f64) -> Result<usize> {
    Ok(decomposition_term_count(&shifted_inverse_matrix(h, shift, delta)?, DEFAULT_DROP_TOL))
}

/// Entrywise `1 / (Diag(H) − E′)` with the same floor.
pub fn diagonal_inverse(h: &Hamiltonian, shift: f64, delta: f64) -> Vec<f64> {
    h.diagonal().iter().map(|d| 1.0 / regularize_gap(d - shift, delta)).collect()
}

pub fn diagonal_inverse_term_count(h: &Hamiltonian, shift: f64, delta: f64) -> Result<usize> {
    let ps = decompose_diagonal(&diagonal_inverse(h, shift, delta), DEFAULT_DROP_TOL)?;
    Ok(pauli_term_count(&ps, DEFAULT_DROP_TOL))
}

fn check_denominator(den: f64) -> Result<()> {
    if den.abs() < EPSILON_DENOMINATOR_TOL || !den.is_finite() {
        return Err(QjdError::IllConditionedEpsilon { denominator: den });
    }
    Ok(())
}

fn multiply(d: &[f64], x: &[Complex64]) -> Vec<Complex64> {
    d.iter().zip(x).map(|(a, b)| b * *a).collect()
}

/// `t = ε B rv − B r` with `B` the regularized `(H − E′I)⁻¹`.
///
/// Direct mode uses `ε = ⟨rv|B|r⟩ / ⟨rv|B|rv⟩`. Kernel mode estimates the
/// denominator from the Pauli decomposition of `B`, takes `ε = 1/⟨rv|B|rv⟩`
/// (the numerator is 1 when `B r = rv`), and applies `εB − I` to `rv` by LCU.
pub fn jd_correction_full(
    h: &Hamiltonian,
    pair: &RitzPair,
    r: &[Complex64],
    delta: f64,
    mode: EvaluationMode,
) -> Result<Correction> {
    let rv = pair.vector.amplitudes();
    match mode {
        EvaluationMode::Direct => {
            let spec = h.spectrum()?;
            let b_rv = shifted_inverse_apply_with(spec, pair.value, rv, delta);
            let b_r = shifted_inverse_apply_with(spec, pair.value, r, delta);
            let num = vecops::inner(rv, &b_r).re;
            let den = vecops::inner(rv, &b_rv).re;
            check_denominator(den)?;
            let eps = num / den;
            let mut t = vecops::scaled(Complex64::new(eps, 0.0), &b_rv);
            vecops::axpy(Complex64::new(-1.0, 0.0), &b_r, &mut t);
            Ok(Correction {
                t,
                epsilon: Some(eps),
                operator_terms: None,
            })
        }
        EvaluationMode::Kernels => {
            let b = decompose_hermitian(&shifted_inverse_matrix(h, pair.value, delta)?, DEFAULT_DROP_TOL);
            let terms = pauli_term_count(&b, DEFAULT_DROP_TOL);
            let den = expectation_sum(&b, &pair.vector)?;
            check_denominator(den)?;
            let eps = 1.0 / den;
            let minus_identity = PauliSum::new(h.n_qubits(), [(Complex64::new(-1.0, 0.0), PauliString::identity(h.n_qubits()))])?;
            let a = b.scaled(Complex64::new(eps, 0.0)).plus(&minus_identity)?;
            let t = lcu_scaled(&a, &pair.vector, 1.0)?;
            Ok(Correction {
                t,
                epsilon: Some(eps),
                operator_terms: Some(terms),
            })
        }
    }
}

/// `A v` recovered from an LCU outcome as `s √p` times the postselected state,
/// times an extra classical scale. An annihilated input gives the zero vector.
fn lcu_scaled(a: &PauliSum, v: &StateVector, extra: f64) -> Result<Vec<Complex64>> {
    match lcu_apply(&a.pruned(0.0), v) {
        Ok(out) => {
            let magnitude = out.s * out.success_probability.sqrt() * extra;
            Ok(vecops::scaled(Complex64::new(magnitude, 0.0), out.state.amplitudes()))
        }
        Err(QjdError::DegenerateOutcome { .. }) | Err(QjdError::DegenerateOperator) => {
            Ok(vec![Complex64::new(0.0, 0.0); v.dim()])
        }
        Err(e) => Err(e),
    }
}

/// `t = ε M⁻¹ rv − M⁻¹ r` with `M = Diag(H) − E′I` and
/// `ε = Re⟨rv|M⁻¹|r⟩ / ⟨rv|M⁻¹|rv⟩`.
pub fn jd_correction_diag(
    h: &Hamiltonian,
    pair: &RitzPair,
    r: &[Complex64],
    delta: f64,
    mode: EvaluationMode,
) -> Result<Correction> {
    let rv = pair.vector.amplitudes();
    let minv = diagonal_inverse(h, pair.value, delta);
    match mode {
        EvaluationMode::Direct => {
            let m_rv = multiply(&minv, rv);
            let m_r = multiply(&minv, r);
            let num = vecops::inner(rv, &m_r).re;
            let den = vecops::inner(rv, &m_rv).re;
            check_denominator(den)?;
            let eps = num / den;
            let mut t = vecops::scaled(Complex64::new(eps, 0.0), &m_rv);
            vecops::axpy(Complex64::new(-1.0, 0.0), &m_r, &mut t);
            Ok(Correction {
                t,
                epsilon: Some(eps),
                operator_terms: None,
            })
        }
        EvaluationMode::Kernels => {
            let m = decompose_diagonal(&minv, DEFAULT_DROP_TOL)?;
            let terms = pauli_term_count(&m, DEFAULT_DROP_TOL);
            let num = overlap_sum(&m, &pair.vector, r)?;
            let den = expectation_sum(&m, &pair.vector)?;
            check_denominator(den)?;
            let eps = num / den;
            let mut u = vecops::scaled(Complex64::new(eps, 0.0), rv);
            vecops::axpy(Complex64::new(-1.0, 0.0), r, &mut u);
            let u_norm = vecops::norm(&u);
            let t = if u_norm == 0.0 {
                u
            } else {
                lcu_scaled(&m, &StateVector::normalized(u)?, u_norm)?
            };
            Ok(Correction {
                t,
                epsilon: Some(eps),
                operator_terms: Some(terms),
            })
        }
    }
}

/// Which preconditioner a correction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    /// Regularized `(H − E′I)⁻¹`.
    FullShiftedInverse,
    /// `Diag(H) − E′I`, regularized entrywise.
    DiagonalShiftedInverse,
    /// `t = r`.
    ResidueIdentity,
}

/// QD corrections: `r`, `M⁻¹ r`, or the regularized `(H − E′I)⁻¹ r`, with no ε term.
pub fn qd_correction(
    h: &Hamiltonian,
    pair: &RitzPair,
    r: &[Complex64],
    kind: PreconditionerKind,
    delta: f64,
) -> Result<Correction> {
    let t = match kind {
        PreconditionerKind::ResidueIdentity => r.to_vec(),
        PreconditionerKind::DiagonalShiftedInverse => multiply(&diagonal_inverse(h, pair.value, delta), r),
        PreconditionerKind::FullShiftedInverse => shifted_inverse_apply(h, pair.value, r, delta)?,
    };
    Ok(Correction {
        t,
        epsilon: None,
        operator_terms: None,
    })
}
