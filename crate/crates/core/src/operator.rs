//! A Hermitian operator given either densely or as a Pauli sum, with lazily
//! computed (and then shared) derived forms.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::dense::{DenseHermitian, MAX_DENSE_DIM};
use crate::error::{QjdError, Result};
use crate::linalg::HermitianEigen;
use crate::pauli::{decompose_hermitian, decomposition_term_count, pauli_term_count, PauliSum, DEFAULT_DROP_TOL};

#[derive(Debug)]
enum Repr {
    Dense(DenseHermitian),
    Pauli(PauliSum),
}

/// Shared, immutable Hamiltonian. Wrap in `Arc` to share the cached
/// eigendecomposition between solver runs.
#[derive(Debug)]
pub struct Hamiltonian {
    repr: Repr,
    dense: OnceLock<DenseHermitian>,
    spectrum: OnceLock<HermitianEigen>,
    diagonal: OnceLock<Vec<f64>>,
    pauli: OnceLock<PauliSum>,
    pauli_terms: OnceLock<usize>,
}

impl Hamiltonian {
    fn with_repr(repr: Repr) -> Self {
        Hamiltonian {
            repr,
            dense: OnceLock::new(),
            spectrum: OnceLock::new(),
            diagonal: OnceLock::new(),
            pauli: OnceLock::new(),
            pauli_terms: OnceLock::new(),
        }
    }

    pub fn from_dense(m: DenseHermitian) -> Self {
        Self::with_repr(Repr::Dense(m))
    }

    /// Fails unless every coefficient is real.
    pub fn from_pauli(ps: PauliSum) -> Result<Self> {
        ps.require_hermitian()?;
        Ok(Self::with_repr(Repr::Pauli(ps)))
    }

    pub fn n_qubits(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.n_qubits(),
            Repr::Pauli(p) => p.n_qubits(),
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    pub fn is_pauli(&self) -> bool {
        matches!(self.repr, Repr::Pauli(_))
    }

    /// `H v`; Pauli sums are applied matrix-free.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match &self.repr {
            Repr::Dense(m) => m.apply(v),
            Repr::Pauli(p) => p.apply(v),
        }
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        match &self.repr {
            Repr::Dense(m) => m.get(row, col),
            Repr::Pauli(p) => p.element(row, col),
        }
    }

    pub fn diagonal(&self) -> &[f64] {
        self.diagonal.get_or_init(|| match &self.repr {
            Repr::Dense(m) => m.diagonal(),
            Repr::Pauli(p) => p.diagonal(),
        })
    }

    pub fn dense(&self) -> Result<&DenseHermitian> {
        match &self.repr {
            Repr::Dense(m) => Ok(m),
            Repr::Pauli(p) => {
                if let Some(m) = self.dense.get() {
                    return Ok(m);
                }
                let m = p.to_dense()?;
                Ok(self.dense.get_or_init(|| m))
            }
        }
    }

    /// Full eigendecomposition, computed once.
    pub fn spectrum(&self) -> Result<&HermitianEigen> {
        if let Some(e) = self.spectrum.get() {
            return Ok(e);
        }
        if self.dim() > MAX_DENSE_DIM {
            return Err(QjdError::Capacity {
                what: format!("eigendecomposition on {} qubits", self.n_qubits()),
                limit: MAX_DENSE_DIM,
            });
        }
        let e = self.dense()?.eigen()?;
        Ok(self.spectrum.get_or_init(|| e))
    }

    /// The operator as a Pauli sum (decomposed on first use for dense input).
    pub fn pauli_sum(&self) -> &PauliSum {
        match &self.repr {
            Repr::Pauli(p) => p,
            Repr::Dense(m) => self.pauli.get_or_init(|| decompose_hermitian(m, DEFAULT_DROP_TOL)),
        }
    }

    /// Number of Pauli terms above the default drop tolerance.
    pub fn pauli_term_count(&self) -> usize {
        *self.pauli_terms.get_or_init(|| match &self.repr {
            Repr::Pauli(p) => pauli_term_count(p, DEFAULT_DROP_TOL),
            Repr::Dense(m) => match self.pauli.get() {
                Some(p) => pauli_term_count(p, DEFAULT_DROP_TOL),
                None => decomposition_term_count(m, DEFAULT_DROP_TOL),
            },
        })
    }

    /// Row diagonal dominance: `|H_ii| ≥ Σ_{j≠i} |H_ij|` on every row.
    pub fn is_diagonally_dominant(&self) -> bool {
        self.dominance_violations().is_empty()
    }

    /// Rows that violate diagonal dominance.
    pub fn dominance_violations(&self) -> Vec<usize> {
        match &self.repr {
            Repr::Dense(m) => dense_violations(m),
            Repr::Pauli(p) => {
                let dim = p.dim();
                let diag = self.diagonal();
                let mut by_mask: indexmap::IndexMap<u64, Vec<(Complex64, crate::pauli::PauliString)>> =
                    indexmap::IndexMap::new();
                for &(c, s) in p.terms() {
                    if s.x_mask() != 0 {
                        by_mask.entry(s.x_mask()).or_default().push((c, s));
                    }
                }
                (0..dim)
                    .filter(|&i| {
                        let off: f64 = by_mask
                            .iter()
                            .map(|(&x, terms)| {
                                let j = i ^ x as usize;
                                terms.iter().map(|(c, s)| c * s.element(i, j)).sum::<Complex64>().norm()
                            })
                            .sum();
                        diag[i].abs() < off
                    })
                    .collect()
            }
        }
    }
}

fn dense_violations(m: &DenseHermitian) -> Vec<usize> {
    (0..m.dim())
        .filter(|&i| {
            let off: f64 = m
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, z)| z.norm())
                .sum();
            m.get(i, i).norm() < off
        })
        .collect()
}

/// `|H_ii| ≥ Σ_{j≠i} |H_ij|` for every row.
pub fn is_diagonally_dominant(m: &DenseHermitian) -> bool {
    dense_violations(m).is_empty()
}

impl From<DenseHermitian> for Hamiltonian {
    fn from(m: DenseHermitian) -> Self {
        Hamiltonian::from_dense(m)
    }
}

impl TryFrom<PauliSum> for Hamiltonian {
    type Error = QjdError;

    fn try_from(ps: PauliSum) -> Result<Self> {
        Hamiltonian::from_pauli(ps)
    }
}
