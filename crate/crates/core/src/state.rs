//! Normalized statevectors and the reference states that seed the solvers.

use num_complex::Complex64;

use crate::error::{QjdError, Result};
use crate::vecops;

/// Normalization tolerance for [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;

/// Unit-norm amplitude vector over `2ⁿ` computational-basis states.
///
/// Unnormalized vectors (residuals, correction vectors) are plain
/// `Vec<Complex64>` throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a zero or non-finite vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        if !vecops::is_finite(&amplitudes) {
            return Err(QjdError::Numeric("non-finite amplitudes".into()));
        }
        let nrm = vecops::norm(&amplitudes);
        if nrm == 0.0 {
            return Err(QjdError::Validation("cannot normalize the zero vector".into()));
        }
        let mut amplitudes = amplitudes;
        vecops::scale(Complex64::new(1.0 / nrm, 0.0), &mut amplitudes);
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Accepts amplitudes that are already unit norm within [`NORM_TOL`].
    pub fn from_unit(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let nrm = vecops::norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(QjdError::Validation(format!("state norm {nrm} is not 1")));
        }
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        vecops::inner(&self.amplitudes, &other.amplitudes).norm_sqr()
    }
}

impl AsRef<[Complex64]> for StateVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(QjdError::Shape(format!("vector length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

pub fn basis_state(index: usize, n_qubits: usize) -> Result<StateVector> {
    let dim = 1usize
        .checked_shl(n_qubits as u32)
        .filter(|_| n_qubits < usize::BITS as usize)
        .ok_or_else(|| QjdError::Shape(format!("unsupported qubit count {n_qubits}")))?;
    if index >= dim {
        return Err(QjdError::Validation(format!(
            "basis index {index} out of range for {n_qubits} qubits"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits, amplitudes })
}

/// Default Gaussian width, in basis-index units.
pub const DEFAULT_SIGMA: f64 = 2.0;

/// Sum of Gaussian peaks over basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRefSpec {
    pub n_qubits: usize,
    pub centers: Vec<usize>,
    pub sigma: f64,
}

/// Amplitude at index `j` is `Σ_c exp(−(j−c)²/(2σ²))` before normalization.
/// Peaks are truncated at the ends of the index range, never wrapped.
pub fn gaussian_reference(spec: &GaussianRefSpec) -> Result<StateVector> {
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) {
        return Err(QjdError::Validation(format!("sigma must be positive, got {}", spec.sigma)));
    }
    if spec.centers.is_empty() {
        return Err(QjdError::Validation("at least one Gaussian center is required".into()));
    }
    let dim = 1usize << spec.n_qubits;
    if let Some(&c) = spec.centers.iter().find(|&&c| c >= dim) {
        return Err(QjdError::Validation(format!("center {c} out of range for dimension {dim}")));
    }
    let two_var = 2.0 * spec.sigma * spec.sigma;
    let amplitudes = (0..dim)
        .map(|j| {
            let a: f64 = spec
                .centers
                .iter()
                .map(|&c| {
                    let d = j as f64 - c as f64;
                    (-d * d / two_var).exp()
                })
                .sum();
            Complex64::new(a, 0.0)
        })
        .collect();
    StateVector::normalized(amplitudes)
}

/// Parses an MSB-first bitstring such as `"0011110011"` into `(index, n_qubits)`.
pub fn parse_bitstring(bits: &str) -> Result<(usize, usize)> {
    let n = bits.len();
    if n == 0 || n >= usize::BITS as usize {
        return Err(QjdError::Validation(format!("unsupported bitstring length {n}")));
    }
    let index = usize::from_str_radix(bits, 2)
        .map_err(|_| QjdError::Validation(format!("'{bits}' is not a binary string")))?;
    Ok((index, n))
}

/// Puts probability `1 − f` on the bitstring's index and `f/2` on each
/// adjacent index. Neighbours outside the range are dropped and the
/// remaining weights renormalized.
pub fn hf_spread_reference(bitstring: &str, spread_fraction: f64) -> Result<StateVector> {
    if !(0.0..1.0).contains(&spread_fraction) {
        return Err(QjdError::Validation(format!(
            "spread fraction must lie in [0, 1), got {spread_fraction}"
        )));
    }
    let (center, n_qubits) = parse_bitstring(bitstring)?;
    let dim = 1usize << n_qubits;
    let mut weights = vec![0.0; dim];
    weights[center] = 1.0 - spread_fraction;
    if spread_fraction > 0.0 {
        if center > 0 {
            weights[center - 1] += spread_fraction / 2.0;
        }
        if center + 1 < dim {
            weights[center + 1] += spread_fraction / 2.0;
        }
    }
    let total: f64 = weights.iter().sum();
    let amplitudes = weights
        .into_iter()
        .map(|w| Complex64::new((w / total).sqrt(), 0.0))
        .collect();
    StateVector::normalized(amplitudes)
}
