//! Dense `2ⁿ × 2ⁿ` Hermitian operators.

use num_complex::Complex64;

use crate::error::{QjdError, Result};
use crate::linalg::{eigh, HermitianEigen};

/// Largest dimension handled by dense factorizations (12 qubits).
pub const MAX_DENSE_DIM: usize = 1 << 12;

/// Hermiticity tolerance enforced on construction (max elementwise |M − M†|).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Row-major dense Hermitian matrix whose dimension is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    dim: usize,
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DenseHermitian {
    /// Validates shape and Hermiticity.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(QjdError::Shape(format!("dimension {dim} is not a power of two")));
        }
        if data.len() != dim * dim {
            return Err(QjdError::Shape(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        let m = Self::from_parts(dim, data);
        let dev = m.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(QjdError::Validation(format!(
                "matrix is not Hermitian (max |M - M^dagger| = {dev:e})"
            )));
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(QjdError::Shape("rows must form a square matrix".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(dim, data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = Complex64::new(d, 0.0);
        }
        Self::new(dim, data)
    }

    pub(crate) fn from_parts(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert!(dim.is_power_of_two() && data.len() == dim * dim);
        DenseHermitian {
            dim,
            n_qubits: dim.trailing_zeros() as usize,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `M x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        if self.is_real() {
            let (re, im): (Vec<f64>, Vec<f64>) = x.iter().map(|z| (z.re, z.im)).unzip();
            (0..self.dim)
                .map(|i| {
                    let row = self.row(i);
                    let (mut a, mut b) = (0.0, 0.0);
                    for ((m, xr), xi) in row.iter().zip(&re).zip(&im) {
                        a += m.re * xr;
                        b += m.re * xi;
                    }
                    Complex64::new(a, b)
                })
                .collect()
        } else {
            (0..self.dim)
                .map(|i| self.row(i).iter().zip(x).map(|(m, v)| m * v).sum())
                .collect()
        }
    }

    /// Induced 1-norm (max column sum), an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        if self.dim > MAX_DENSE_DIM {
            return Err(QjdError::Capacity {
                what: format!("dense eigendecomposition of dimension {}", self.dim),
                limit: MAX_DENSE_DIM,
            });
        }
        Ok(eigh(self.dim, &self.data))
    }
}
