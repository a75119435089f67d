//! Orthonormal search subspaces, the projected (Rayleigh–Ritz) eigenproblem,
//! residuals and convergence tests.

use num_complex::Complex64;

use crate::error::{QjdError, Result};
use crate::linalg::eigh;
use crate::operator::Hamiltonian;
use crate::state::StateVector;
use crate::vecops;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const DEFAULT_REJECT_TOL: f64 = 1e-8;

/// Tolerance on the Hermiticity of the projected matrix.
pub const PROJECTED_HERMITIAN_TOL: f64 = 1e-8;

/// Ordered orthonormal basis `v₁ … v_k`.
#[derive(Debug, Clone)]
pub struct Subspace {
    n_qubits: usize,
    basis: Vec<Vec<Complex64>>,
}

/// What happened to a candidate vector in [`gram_schmidt_append`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AppendOutcome {
    Appended,
    /// The orthogonal remainder fell below `reject_tol · ‖t‖`.
    Rejected { remaining_norm: f64, input_norm: f64 },
}

impl AppendOutcome {
    pub fn is_rejected(&self) -> bool {
        matches!(self, AppendOutcome::Rejected { .. })
    }
}

impl Subspace {
    pub fn new(n_qubits: usize) -> Self {
        Subspace { n_qubits, basis: Vec::new() }
    }

    pub fn from_state(v: &StateVector) -> Self {
        Subspace {
            n_qubits: v.n_qubits(),
            basis: vec![v.amplitudes().to_vec()],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// `max |⟨vᵢ|vⱼ⟩ − δᵢⱼ|`
    pub fn gram_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((vecops::inner(a, b) - target).norm());
            }
        }
        dev
    }

    /// `Σ cᵢ vᵢ`
    pub fn combine(&self, coords: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; 1 << self.n_qubits];
        for (c, v) in coords.iter().zip(&self.basis) {
            vecops::axpy(*c, v, &mut out);
        }
        out
    }
}

/// Two passes of classical Gram–Schmidt, then normalize and append.
pub fn gram_schmidt_append(v: &mut Subspace, t: &[Complex64], reject_tol: f64) -> Result<AppendOutcome> {
    if t.len() != 1 << v.n_qubits {
        return Err(QjdError::Shape(format!("vector of length {} for {} qubits", t.len(), v.n_qubits)));
    }
    if !vecops::is_finite(t) {
        return Err(QjdError::Numeric("non-finite correction vector".into()));
    }
    let input_norm = vecops::norm(t);
    let mut w = t.to_vec();
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = v.basis.iter().map(|b| vecops::inner(b, &w)).collect();
        for (c, b) in coeffs.iter().zip(&v.basis) {
            vecops::axpy(-c, b, &mut w);
        }
    }
    let remaining_norm = vecops::norm(&w);
    if input_norm == 0.0 || remaining_norm < reject_tol * input_norm || v.dim() >= t.len() {
        return Ok(AppendOutcome::Rejected { remaining_norm, input_norm });
    }
    vecops::scale(Complex64::new(1.0 / remaining_norm, 0.0), &mut w);
    v.basis.push(w);
    Ok(AppendOutcome::Appended)
}

/// Lowest eigenpair of the projected problem, lifted to the full space.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    pub vector: StateVector,
    pub subspace_coords: Vec<Complex64>,
}

/// Projected matrix `H′ = V†HV` grown one row/column per appended vector,
/// keeping `wᵢ = H vᵢ` so residuals need no extra application of `H`.
#[derive(Debug, Clone)]
pub struct ProjectedProblem {
    images: Vec<Vec<Complex64>>,
    /// Row-major `k × k`.
    matrix: Vec<Complex64>,
}

impl Default for ProjectedProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl ProjectedProblem {
    pub fn new() -> Self {
        ProjectedProblem {
            images: Vec::new(),
            matrix: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    /// Brings the projection up to date with `v` (which may have grown by any number of vectors).
    pub fn sync(&mut self, h: &Hamiltonian, v: &Subspace) -> Result<()> {
        while self.images.len() < v.dim() {
            let k = self.images.len();
            let vk = &v.basis[k];
            let wk = h.apply(vk);
            let old = k;
            let new = k + 1;
            let mut matrix = vec![ZERO; new * new];
            for i in 0..old {
                matrix[i * new..i * new + old].copy_from_slice(&self.matrix[i * old..(i + 1) * old]);
            }
            for i in 0..new {
                let w_i = if i == k { &wk } else { &self.images[i] };
                let upper = vecops::inner(&v.basis[i], &wk);
                let lower = vecops::inner(vk, w_i);
                let scale = 1.0f64.max(upper.norm());
                if (upper - lower.conj()).norm() > PROJECTED_HERMITIAN_TOL * scale {
                    return Err(QjdError::Numeric(format!(
                        "projected matrix not Hermitian at ({i}, {k}): {upper} vs {lower}"
                    )));
                }
                let sym = 0.5 * (upper + lower.conj());
                if i == k {
                    matrix[k * new + k] = Complex64::new(sym.re, 0.0);
                } else {
                    matrix[i * new + k] = sym;
                    matrix[k * new + i] = sym.conj();
                }
            }
            self.matrix = matrix;
            self.images.push(wk);
        }
        Ok(())
    }

    /// Lowest Ritz pair and its residual `H rv − E′ rv`.
    pub fn lowest(&self, v: &Subspace) -> Result<(RitzPair, Vec<Complex64>)> {
        let k = self.dim();
        if k == 0 || k != v.dim() {
            return Err(QjdError::Validation("projected problem out of sync with subspace".into()));
        }
        let eig = eigh(k, &self.matrix);
        let value = eig.values()[0];
        let coords = eig.vector(0);
        let rv = v.combine(&coords);
        let mut hrv = vec![ZERO; rv.len()];
        for (c, w) in coords.iter().zip(&self.images) {
            vecops::axpy(*c, w, &mut hrv);
        }
        if !value.is_finite() || !vecops::is_finite(&rv) {
            return Err(QjdError::Numeric("non-finite Ritz pair".into()));
        }
        let nrm = vecops::norm(&rv);
        let inv = Complex64::new(1.0 / nrm, 0.0);
        vecops::scale(inv, &mut hrv);
        let vector = StateVector::normalized(rv)?;
        let mut r = hrv;
        vecops::axpy(Complex64::new(-value, 0.0), vector.amplitudes(), &mut r);
        Ok((
            RitzPair {
                value,
                vector,
                subspace_coords: coords,
            },
            r,
        ))
    }
}

/// Rebuilds `V†HV` from scratch and returns its lowest Ritz pair.
pub fn rayleigh_ritz(h: &Hamiltonian, v: &Subspace) -> Result<RitzPair> {
    if v.is_empty() {
        return Err(QjdError::Validation("Rayleigh–Ritz needs a nonempty subspace".into()));
    }
    if v.n_qubits() != h.n_qubits() {
        return Err(QjdError::Shape("subspace and operator qubit counts differ".into()));
    }
    let mut proj = ProjectedProblem::new();
    proj.sync(h, v)?;
    Ok(proj.lowest(v)?.0)
}

/// `r = (H − E′I)|rv⟩`
pub fn residual(h: &Hamiltonian, pair: &RitzPair) -> Vec<Complex64> {
    let rv = pair.vector.amplitudes();
    let mut r = h.apply(rv);
    vecops::axpy(Complex64::new(-pair.value, 0.0), rv, &mut r);
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriteria {
    /// `‖r‖ ≤ c`
    pub residual_tol: f64,
    /// `|E′ − E₀| ≤ ε_E`, used only when an oracle energy is supplied.
    pub energy_tol: f64,
}

impl Default for ConvergenceCriteria {
    fn default() -> Self {
        ConvergenceCriteria {
            residual_tol: 1e-8,
            energy_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceStatus {
    Continuing,
    ConvergedResidual,
    ConvergedEnergy,
}

impl ConvergenceStatus {
    pub fn is_converged(&self) -> bool {
        !matches!(self, ConvergenceStatus::Continuing)
    }
}

pub fn check_convergence(
    residual_norm: f64,
    pair: &RitzPair,
    oracle_e0: Option<f64>,
    criteria: &ConvergenceCriteria,
) -> ConvergenceStatus {
    if residual_norm <= criteria.residual_tol {
        return ConvergenceStatus::ConvergedResidual;
    }
    match oracle_e0 {
        Some(e0) if (pair.value - e0).abs() <= criteria.energy_tol => ConvergenceStatus::ConvergedEnergy,
        _ => ConvergenceStatus::Continuing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseHermitian;
    use crate::models::exact_ground_pair;
    use crate::state::basis_state;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_by_two() -> Hamiltonian {
        Hamiltonian::from_dense(DenseHermitian::from_real_rows(&[vec![1.0, 0.1], vec![0.1, 2.0]]).unwrap())
    }

    #[test]
    fn append_examples() {
        let mut v = Subspace::from_state(&basis_state(0, 1).unwrap());
        assert_eq!(gram_schmidt_append(&mut v, &[c(0.0), c(1.0)], DEFAULT_REJECT_TOL).unwrap(), AppendOutcome::Appended);
        assert_eq!(v.dim(), 2);

        let mut v = Subspace::from_state(&basis_state(0, 1).unwrap());
        assert!(gram_schmidt_append(&mut v, &[c(1.0), c(0.0)], DEFAULT_REJECT_TOL).unwrap().is_rejected());
        assert_eq!(v.dim(), 1);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(!gram_schmidt_append(&mut v, &[c(h), c(h)], DEFAULT_REJECT_TOL).unwrap().is_rejected());
        assert!(vecops::max_abs_diff(&v.basis()[1], &[c(0.0), c(1.0)]) < 1e-12);

        assert!(matches!(
            gram_schmidt_append(&mut v, &[c(f64::NAN), c(0.0)], DEFAULT_REJECT_TOL),
            Err(QjdError::Numeric(_))
        ));
    }

    #[test]
    fn single_vector_projection() {
        let h = two_by_two();
        let v = Subspace::from_state(&basis_state(0, 1).unwrap());
        let pair = rayleigh_ritz(&h, &v).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-15);
        let r = residual(&h, &pair);
        assert!(vecops::max_abs_diff(&r, &[c(0.0), c(0.1)]) < 1e-15);
    }

    #[test]
    fn full_basis_matches_exact() {
        let m = DenseHermitian::from_real_rows(&[
            vec![2.0, 0.3, 0.0, 0.1],
            vec![0.3, 1.0, 0.2, 0.0],
            vec![0.0, 0.2, 3.0, 0.4],
            vec![0.1, 0.0, 0.4, 0.5],
        ])
        .unwrap();
        let h = Hamiltonian::from_dense(m);
        let mut v = Subspace::new(2);
        for i in 0..4 {
            gram_schmidt_append(&mut v, basis_state(i, 2).unwrap().amplitudes(), DEFAULT_REJECT_TOL).unwrap();
        }
        let pair = rayleigh_ritz(&h, &v).unwrap();
        let (e0, v0) = exact_ground_pair(&h).unwrap();
        assert!((pair.value - e0).abs() < 1e-10);
        assert!((pair.vector.fidelity(&v0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn residual_by_hand() {
        let h = Hamiltonian::from_dense(DenseHermitian::from_diagonal(&[1.0, 2.0]).unwrap());
        let rv = StateVector::normalized(vec![c(1.0), c(1.0)]).unwrap();
        let pair = rayleigh_ritz(&h, &Subspace::from_state(&rv)).unwrap();
        assert!((pair.value - 1.5).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = residual(&h, &pair);
        // The lifted vector may carry any global phase; compare up to it.
        let expected = [c(-0.5 * s), c(0.5 * s)];
        let phase = pair.vector.amplitudes()[0] / c(s);
        assert!(vecops::max_abs_diff(&r, &vecops::scaled(phase, &expected)) < 1e-15);
    }

    #[test]
    fn exact_eigenvector_subspace() {
        let h = two_by_two();
        let (e0, v0) = exact_ground_pair(&h).unwrap();
        let pair = rayleigh_ritz(&h, &Subspace::from_state(&v0)).unwrap();
        assert!((pair.value - e0).abs() < 1e-14);
        assert!(vecops::norm(&residual(&h, &pair)) < 1e-9);
    }

    #[test]
    fn convergence_examples() {
        let pair = RitzPair {
            value: 1.0 + 1e-11,
            vector: basis_state(0, 1).unwrap(),
            subspace_coords: vec![c(1.0)],
        };
        let crit = ConvergenceCriteria::default();
        assert_eq!(check_convergence(0.0, &pair, None, &crit), ConvergenceStatus::ConvergedResidual);
        assert_eq!(check_convergence(1.0, &pair, Some(1.0), &crit), ConvergenceStatus::ConvergedEnergy);
        assert_eq!(check_convergence(1.0, &pair, None, &crit), ConvergenceStatus::Continuing);
    }
}
