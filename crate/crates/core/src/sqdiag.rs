//! Sample-based diagonalization: keep the `n` most probable computational
//! basis states of a vector and diagonalize `H` on their span.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::error::{QjdError, Result};
use crate::linalg::eigh;
use crate::operator::Hamiltonian;
use crate::state::StateVector;

/// How the dominant basis states are identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Rank by exact probabilities.
    Exact,
    /// Rank by outcome frequency over `count` seeded samples.
    Shots { count: u64, seed: u64 },
}

/// Indices ordered by descending probability (or frequency), ties ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSelection {
    pub indices: Vec<usize>,
    /// Shots mode observed fewer than `n` distinct outcomes.
    pub shortfall: bool,
}

pub fn top_n_bases(v: &StateVector, n: usize, mode: SamplingMode) -> Result<BasisSelection> {
    if n == 0 || n > v.dim() {
        return Err(QjdError::Validation(format!("cannot select {n} of {} basis states", v.dim())));
    }
    let probs = v.probabilities();
    let scores: Vec<f64> = match mode {
        SamplingMode::Exact => probs,
        SamplingMode::Shots { count, seed } => {
            if count == 0 {
                return Err(QjdError::Validation("shot count must be positive".into()));
            }
            let dist = WeightedIndex::new(&probs).map_err(|e| QjdError::Numeric(format!("sampling weights: {e}")))?;
            let mut rng = SplitMix64::seed_from_u64(seed);
            let mut counts = vec![0u64; probs.len()];
            for _ in 0..count {
                counts[dist.sample(&mut rng)] += 1;
            }
            counts.into_iter().map(|c| c as f64).collect()
        }
    };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let observed = match mode {
        SamplingMode::Exact => order.len(),
        SamplingMode::Shots { .. } => scores.iter().filter(|&&c| c > 0.0).count(),
    };
    let take = n.min(observed);
    order.truncate(take);
    Ok(BasisSelection {
        indices: order,
        shortfall: take < n,
    })
}

/// Row-major `k × k` Hermitian matrix `⟨e_{i_a}|H|e_{i_b}⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl ReducedMatrix {
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.data[a * self.dim + b]
    }
}

pub fn project_hamiltonian(h: &Hamiltonian, indices: &[usize]) -> Result<ReducedMatrix> {
    for (k, &i) in indices.iter().enumerate() {
        if i >= h.dim() {
            return Err(QjdError::Validation(format!("basis index {i} out of range")));
        }
        if indices[..k].contains(&i) {
            return Err(QjdError::Validation(format!("duplicate basis index {i}")));
        }
    }
    let k = indices.len();
    let mut data = vec![Complex64::new(0.0, 0.0); k * k];
    for (a, &i) in indices.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate() {
            data[a * k + b] = h.element(i, j);
        }
    }
    Ok(ReducedMatrix { dim: k, data })
}

#[derive(Debug, Clone)]
pub struct SqdiagResult {
    pub selected_indices: Vec<usize>,
    pub shortfall: bool,
    pub reduced_matrix: ReducedMatrix,
    pub energy: f64,
    /// Coefficients on `selected_indices`, largest-magnitude entry real positive.
    pub coefficients: Vec<Complex64>,
    pub refined_state: StateVector,
}

pub fn sqdiag_refine(h: &Hamiltonian, v: &StateVector, n: usize, mode: SamplingMode) -> Result<SqdiagResult> {
    if v.n_qubits() != h.n_qubits() {
        return Err(QjdError::Shape("state and operator qubit counts differ".into()));
    }
    let selection = top_n_bases(v, n, mode)?;
    let reduced = project_hamiltonian(h, &selection.indices)?;
    let eig = eigh(reduced.dim, &reduced.data);
    let energy = eig.values()[0];
    let mut coefficients = eig.vector(0);
    let lead = coefficients
        .iter()
        .enumerate()
        .fold(0, |best, (k, c)| if c.norm() > coefficients[best].norm() { k } else { best });
    let phase = coefficients[lead].conj() / coefficients[lead].norm();
    for c in &mut coefficients {
        *c *= phase;
    }
    coefficients[lead] = Complex64::new(coefficients[lead].re, 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); h.dim()];
    for (&i, &c) in selection.indices.iter().zip(&coefficients) {
        amps[i] = c;
    }
    Ok(SqdiagResult {
        selected_indices: selection.indices,
        shortfall: selection.shortfall,
        reduced_matrix: reduced,
        energy,
        coefficients,
        refined_state: StateVector::normalized(amps)?,
    })
}
