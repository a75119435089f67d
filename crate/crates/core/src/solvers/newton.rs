//! Exact solution of the projected correction equation, and the Gateaux
//! differential of the Rayleigh quotient. Both serve as validation oracles.

use num_complex::Complex64;

use crate::error::{QjdError, Result};
use crate::kernels::{HouseholderPreparation, StatePreparation};
use crate::linalg::eigh;
use crate::operator::Hamiltonian;
use crate::state::StateVector;
use crate::subspace::RitzPair;
use crate::vecops;

pub const MAX_NEWTON_DIM: usize = 1 << 10;

#[derive(Debug, Clone)]
pub struct ProjectedSolution {
    pub t: Vec<Complex64>,
    /// The complement block had eigenvalues below the rank cutoff.
    pub rank_deficient: bool,
}

/// Solves `(I − |rv⟩⟨rv|)(H − E′I)(I − |rv⟩⟨rv|) t = −r` with `t ⟂ rv`.
///
/// A unitary `U` with first column `rv` splits off the complement; the
/// `(N−1)×(N−1)` block of `U†(H − E′I)U` is inverted through its eigenvalues,
/// dropping those below `1e-12 · max|λ|` (least squares).
pub fn solve_correction_projected(h: &Hamiltonian, pair: &RitzPair, r: &[Complex64]) -> Result<ProjectedSolution> {
    let n = h.dim();
    if n > MAX_NEWTON_DIM {
        return Err(QjdError::Capacity {
            what: format!("projected correction solve of dimension {n}"),
            limit: MAX_NEWTON_DIM,
        });
    }
    if n < 2 {
        return Ok(ProjectedSolution {
            t: vec![Complex64::new(0.0, 0.0); n],
            rank_deficient: false,
        });
    }
    let prep = HouseholderPreparation::new(&pair.vector);
    let columns: Vec<Vec<Complex64>> = (1..n)
        .map(|k| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[k] = Complex64::new(1.0, 0.0);
            prep.apply(&e)
        })
        .collect();
    let images: Vec<Vec<Complex64>> = columns
        .iter()
        .map(|u| {
            let mut w = h.apply(u);
            vecops::axpy(Complex64::new(-pair.value, 0.0), u, &mut w);
            w
        })
        .collect();
    let m = n - 1;
    let mut block = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..=i {
            let z = vecops::inner(&columns[i], &images[j]);
            block[i * m + j] = z;
            block[j * m + i] = z.conj();
        }
    }
    let rhs: Vec<Complex64> = columns.iter().map(|u| -vecops::inner(u, r)).collect();
    let eig = eigh(m, &block);
    let scale = eig.values().iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let cutoff = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let rank_deficient = eig.values().iter().any(|l| l.abs() <= cutoff);
    let y = eig.apply_fn(|l| if l.abs() <= cutoff { 0.0 } else { 1.0 / l }, &rhs);
    let mut t = vec![Complex64::new(0.0, 0.0); n];
    for (c, u) in y.iter().zip(&columns) {
        vecops::axpy(*c, u, &mut t);
    }
    Ok(ProjectedSolution { t, rank_deficient })
}

/// `2 Re⟨x′|H|x⟩`
pub fn gateaux_rayleigh_differential(h: &Hamiltonian, x: &StateVector, direction: &[Complex64]) -> f64 {
    2.0 * vecops::inner(direction, &h.apply(x.amplitudes())).re
}
