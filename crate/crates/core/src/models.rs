//! The experiment Hamiltonians: seeded diagonally dominant matrices, the
//! periodic transverse-field Ising chain, and file-loaded Pauli sums. Plus
//! the exact-diagonalization oracle and the dense binary file format.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dense::{DenseHermitian, MAX_DENSE_DIM};
use crate::error::{QjdError, Result};
use crate::operator::Hamiltonian;
use crate::pauli::{PauliString, PauliSum};
use crate::state::StateVector;

pub const DEFAULT_DD_SEED: u64 = 20240101;

/// Parameters of a diagonally dominant test matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DdMatrixSpec {
    pub n_qubits: usize,
    /// 1-based diagonal positions set to the minimum value 1.
    pub minima_positions: Vec<usize>,
    pub off_diag_scale: f64,
    pub seed: u64,
}

impl DdMatrixSpec {
    /// `H_ii = i` with minima at `positions`, off-diagonals in `[0, 2⁻ⁿ]`.
    pub fn new(n_qubits: usize, minima_positions: Vec<usize>) -> Self {
        DdMatrixSpec {
            n_qubits,
            minima_positions,
            off_diag_scale: 1.0 / (1u64 << n_qubits) as f64,
            seed: DEFAULT_DD_SEED,
        }
    }

    pub fn ns(&self) -> usize {
        self.minima_positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || (1usize << self.n_qubits) > MAX_DENSE_DIM {
            return Err(QjdError::Validation(format!("unsupported qubit count {}", self.n_qubits)));
        }
        let dim = 1usize << self.n_qubits;
        if self.minima_positions.is_empty() {
            return Err(QjdError::Validation("at least one minimum position is required".into()));
        }
        for (k, &p) in self.minima_positions.iter().enumerate() {
            if p == 0 || p > dim {
                return Err(QjdError::Validation(format!("minimum position {p} outside [1, {dim}]")));
            }
            if self.minima_positions[..k].contains(&p) {
                return Err(QjdError::Validation(format!("duplicate minimum position {p}")));
            }
        }
        if !(self.off_diag_scale >= 0.0 && self.off_diag_scale.is_finite()) {
            return Err(QjdError::Validation("off-diagonal scale must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of a SplitMix64 output.
///
/// This pair (SplitMix64 seeded directly with the 64-bit seed, then
/// `(u >> 11) · 2⁻⁵³`) is the reproducibility contract for generated
/// matrices; any implementation following it produces identical bits.
pub fn unit_uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Real symmetric matrix with `H_ii = i` (1-based), minima set to 1, and the
/// strict upper triangle drawn row-major from `U[0, off_diag_scale]`.
pub fn build_dd_matrix(spec: &DdMatrixSpec) -> Result<DenseHermitian> {
    spec.validate()?;
    let dim = 1usize << spec.n_qubits;
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        data[i * dim + i] = Complex64::new((i + 1) as f64, 0.0);
    }
    for &p in &spec.minima_positions {
        data[(p - 1) * dim + (p - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = Complex64::new(spec.off_diag_scale * unit_uniform(&mut rng), 0.0);
            data[i * dim + j] = v;
            data[j * dim + i] = v;
        }
    }
    Ok(DenseHermitian::from_parts(dim, data))
}

/// Periodic chain `−J Σ ZᵢZᵢ₊₁ − h Σ Zᵢ − g Σ Xᵢ`; site 1 is the leftmost
/// label position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingSpec {
    pub n_sites: usize,
    pub j: f64,
    pub h: f64,
    pub g: f64,
}

pub fn build_ising(spec: &IsingSpec) -> Result<PauliSum> {
    let n = spec.n_sites;
    if !(2..=32).contains(&n) {
        return Err(QjdError::Validation(format!("Ising chain needs 2..=32 sites, got {n}")));
    }
    let site = |i: usize| 1u64 << (n - 1 - i);
    let mut terms = Vec::with_capacity(3 * n);
    let mut push = |c: f64, x: u64, z: u64| -> Result<()> {
        if c != 0.0 {
            terms.push((Complex64::new(c, 0.0), PauliString::from_masks(n, x, z)?));
        }
        Ok(())
    };
    // For n = 2 the bonds (1,2) and (2,1) are the same string and merge to −2J ZZ.
    for i in 0..n {
        push(-spec.j, 0, site(i) | site((i + 1) % n))?;
    }
    for i in 0..n {
        push(-spec.h, 0, site(i))?;
    }
    for i in 0..n {
        push(-spec.g, site(i), 0)?;
    }
    PauliSum::new(n, terms)
}

/// Loads the `<real> <imag> <label>` text format and checks Hermiticity.
pub fn load_pauli_hamiltonian(path: impl AsRef<Path>) -> Result<PauliSum> {
    let ps = PauliSum::load(path)?;
    ps.require_hermitian()?;
    Ok(ps)
}

/// Smallest eigenvalue and a unit eigenvector, via the cached dense spectrum.
pub fn exact_ground_pair(h: &Hamiltonian) -> Result<(f64, StateVector)> {
    let spec = h.spectrum()?;
    let v0 = StateVector::normalized(spec.vector(0))?;
    Ok((spec.values()[0], v0))
}

const DENSE_MAGIC: &[u8; 4] = b"QJDM";

/// Writes `QJDM`, a little-endian `u32` dimension, then row-major `f64` LE entries.
/// Only real matrices are representable.
pub fn write_dense_binary(m: &DenseHermitian, mut w: impl Write) -> Result<()> {
    if !m.is_real() {
        return Err(QjdError::Validation("dense binary format stores real matrices only".into()));
    }
    let io = |e| QjdError::io("<dense writer>", e);
    w.write_all(DENSE_MAGIC).map_err(io)?;
    w.write_all(&(m.dim() as u32).to_le_bytes()).map_err(io)?;
    let mut buf = Vec::with_capacity(m.dim() * m.dim() * 8);
    for z in m.data() {
        buf.extend_from_slice(&z.re.to_le_bytes());
    }
    w.write_all(&buf).map_err(io)?;
    Ok(())
}

pub fn read_dense_binary(mut r: impl Read) -> Result<DenseHermitian> {
    let io = |e| QjdError::io("<dense reader>", e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != DENSE_MAGIC {
        return Err(QjdError::Validation("missing QJDM magic".into()));
    }
    let mut dim_bytes = [0u8; 4];
    r.read_exact(&mut dim_bytes).map_err(io)?;
    let dim = u32::from_le_bytes(dim_bytes) as usize;
    if dim > MAX_DENSE_DIM {
        return Err(QjdError::Capacity {
            what: format!("dense file of dimension {dim}"),
            limit: MAX_DENSE_DIM,
        });
    }
    let mut bytes = vec![0u8; dim * dim * 8];
    r.read_exact(&mut bytes).map_err(io)?;
    let data = bytes
        .chunks_exact(8)
        .map(|b| Complex64::new(f64::from_le_bytes(b.try_into().expect("chunk of 8")), 0.0))
        .collect();
    DenseHermitian::new(dim, data)
}

pub fn save_dense(m: &DenseHermitian, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| QjdError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_dense_binary(m, &mut w)?;
    w.flush().map_err(|e| QjdError::io(path, e))
}

pub fn load_dense(path: impl AsRef<Path>) -> Result<DenseHermitian> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| QjdError::io(path, e))?;
    read_dense_binary(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::is_diagonally_dominant;
    use crate::vecops;

    #[test]
    fn splitmix_reference_stream() {
        // Reference outputs of SplitMix64 seeded with 0.
        let mut rng = SplitMix64::seed_from_u64(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
    }

    #[test]
    fn dd_diagonal_layout() {
        let m = build_dd_matrix(&DdMatrixSpec::new(8, vec![1])).unwrap();
        assert_eq!(m.dim(), 256);
        let d = m.diagonal();
        assert_eq!(d[0], 1.0);
        assert_eq!(d[1], 2.0);
        assert_eq!(d[255], 256.0);

        let m = build_dd_matrix(&DdMatrixSpec::new(8, vec![1, 256])).unwrap();
        assert_eq!(m.get(0, 0).re, 1.0);
        assert_eq!(m.get(255, 255).re, 1.0);
    }

    #[test]
    fn dd_zero_scale_is_diagonal() {
        let mut spec = DdMatrixSpec::new(3, vec![1]);
        spec.off_diag_scale = 0.0;
        let h = Hamiltonian::from_dense(build_dd_matrix(&spec).unwrap());
        let (e0, _) = exact_ground_pair(&h).unwrap();
        assert_eq!(e0, 1.0);
    }

    #[test]
    fn dd_is_dominant_symmetric_and_deterministic() {
        let spec = DdMatrixSpec::new(8, vec![1, 128, 256]);
        let a = build_dd_matrix(&spec).unwrap();
        let b = build_dd_matrix(&spec).unwrap();
        assert_eq!(a, b);
        assert!(is_diagonally_dominant(&a));
        assert!(a.is_real());
        assert_eq!(a.hermiticity_deviation(), 0.0);
        let max_off = (0..256)
            .flat_map(|i| (0..256).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).re)
            .fold(0.0, f64::max);
        assert!(max_off <= 1.0 / 256.0);
    }

    #[test]
    fn dd_rejects_bad_positions() {
        assert!(build_dd_matrix(&DdMatrixSpec::new(2, vec![0])).is_err());
        assert!(build_dd_matrix(&DdMatrixSpec::new(2, vec![5])).is_err());
        assert!(build_dd_matrix(&DdMatrixSpec::new(2, vec![2, 2])).is_err());
    }

    #[test]
    fn ising_term_structure() {
        let ps = build_ising(&IsingSpec { n_sites: 12, j: 1.1, h: 0.9, g: 0.01 }).unwrap();
        assert_eq!(ps.len(), 36);
        assert_eq!(ps.coefficient(&"ZIIIIIIIIIIZ".parse().unwrap()), Complex64::new(-1.1, 0.0));
        assert_eq!(ps.coefficient(&"IIIIIIIIIIIX".parse().unwrap()), Complex64::new(-0.01, 0.0));
    }

    #[test]
    fn two_site_ising_ground_state() {
        let ps = build_ising(&IsingSpec { n_sites: 2, j: 1.1, h: 0.9, g: 0.0 }).unwrap();
        // Diagonal enumeration: s1 s2 ∈ {±1}, E = −2J s1 s2 − h (s1 + s2).
        let mut diag = Vec::new();
        for idx in 0..4usize {
            let s1 = if idx & 2 == 0 { 1.0 } else { -1.0 };
            let s2 = if idx & 1 == 0 { 1.0 } else { -1.0 };
            diag.push(-2.0 * 1.1 * s1 * s2 - 0.9 * (s1 + s2));
        }
        for (a, b) in ps.diagonal().iter().zip(&diag) {
            assert!((a - b).abs() < 1e-14);
        }
        let h = Hamiltonian::from_pauli(ps).unwrap();
        let (e0, v0) = exact_ground_pair(&h).unwrap();
        assert!((e0 + 4.0).abs() < 1e-12);
        assert!((v0.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_ground_pair_examples() {
        let h = Hamiltonian::from_dense(DenseHermitian::from_diagonal(&[3.0, 1.0, 2.0, 5.0]).unwrap());
        let (e0, v0) = exact_ground_pair(&h).unwrap();
        assert_eq!(e0, 1.0);
        assert!((v0.amplitudes()[1].norm() - 1.0).abs() < 1e-15);

        let h = Hamiltonian::from_dense(DenseHermitian::from_real_rows(&[vec![1.0, 0.1], vec![0.1, 2.0]]).unwrap());
        let (e0, v0) = exact_ground_pair(&h).unwrap();
        assert!((e0 - (3.0 - 1.04f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((e0 - 0.990098).abs() < 1e-6);
        let hv = h.apply(v0.amplitudes());
        let r = vecops::sub(&hv, &vecops::scaled(Complex64::new(e0, 0.0), v0.amplitudes()));
        assert!(vecops::norm(&r) < 1e-12);
    }

    #[test]
    fn dense_binary_round_trip_and_magic() {
        let m = build_dd_matrix(&DdMatrixSpec::new(3, vec![1])).unwrap();
        let mut buf = Vec::new();
        write_dense_binary(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"QJDM");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 8);
        assert_eq!(buf.len(), 8 + 64 * 8);
        assert_eq!(read_dense_binary(&buf[..]).unwrap(), m);
        assert!(read_dense_binary(&b"NOPE\0\0\0\0"[..]).is_err());
    }

    #[test]
    fn load_pauli_checks_hermiticity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.txt");
        std::fs::write(&path, "1.0 0.5 Z\n").unwrap();
        assert!(matches!(load_pauli_hamiltonian(&path), Err(QjdError::Validation(_))));
        std::fs::write(&path, "1.0 0.0 Z\n").unwrap();
        assert_eq!(load_pauli_hamiltonian(&path).unwrap().len(), 1);
    }
}
