//! Pauli strings, weighted Pauli sums and their unitary-combination form.
//!
//! Qubit ordering: the leftmost letter of a label acts on the most
//! significant bit of the computational-basis index, so `"XZ"` is `X ⊗ Z`
//! and the label `"0011110011"`-style bitstrings read the same way.
//!
//! A string is stored in symplectic form: bit `q` of `x` is set for `X`/`Y`
//! on qubit `q`, bit `q` of `z` for `Z`/`Y`. Its action on a basis state is
//! `P|j⟩ = i^{|x∧z|} (−1)^{|j∧z|} |j ⊕ x⟩`.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use num_complex::Complex64;

use crate::dense::{DenseHermitian, MAX_DENSE_DIM};
use crate::error::{QjdError, Result};
use crate::vecops::walsh_hadamard;

/// Default magnitude below which decomposed coefficients are dropped.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Coefficients with imaginary part beyond this are not Hermitian.
pub const HERMITIAN_COEFF_TOL: f64 = 1e-10;

const MAX_QUBITS: usize = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString { n_qubits, x: 0, z: 0 }
    }

    /// Builds a string from symplectic masks; bits at or above `n_qubits` must be clear.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QjdError::Shape(format!("unsupported qubit count {n_qubits}")));
        }
        let full = (1u64 << n_qubits) - 1;
        if (x | z) & !full != 0 {
            return Err(QjdError::Shape("mask has bits beyond the qubit count".into()));
        }
        Ok(PauliString { n_qubits, x, z })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True for strings built only from `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Mask of qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Letter acting on the qubit stored at bit `bit`.
    pub fn letter_at_bit(&self, bit: usize) -> char {
        match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|bit| self.letter_at_bit(bit))
            .collect()
    }

    /// `i^{|x∧z|}`, the phase contributed by the `Y` letters.
    fn y_phase(&self) -> Complex64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Matrix element `⟨row|P|col⟩`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        if (row ^ col) as u64 != self.x {
            return ZERO;
        }
        let sign = if ((col as u64) & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        self.y_phase() * sign
    }

    /// `out += coeff · P v`, by index arithmetic.
    pub fn apply_accumulate(&self, coeff: Complex64, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), 1usize << self.n_qubits);
        let c = coeff * self.y_phase();
        let x = self.x as usize;
        let z = self.z as usize;
        for (j, vj) in v.iter().enumerate() {
            let prod = c * vj;
            if (j & z).count_ones().is_multiple_of(2) {
                out[j ^ x] += prod;
            } else {
                out[j ^ x] -= prod;
            }
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        self.apply_accumulate(Complex64::new(1.0, 0.0), v, &mut out);
        out
    }
}

impl FromStr for PauliString {
    type Err = QjdError;

    fn from_str(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(QjdError::Shape(format!("unsupported label length {n}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (pos, ch) in label.chars().enumerate() {
            let bit = 1u64 << (n - 1 - pos);
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                other => {
                    return Err(QjdError::Validation(format!("invalid Pauli letter '{other}'")));
                }
            }
        }
        Ok(PauliString { n_qubits: n, x, z })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Dense matrix of a Pauli string, for oracles at small `n`.
pub fn pauli_matrix(p: &PauliString) -> Result<DenseHermitian> {
    let dim = 1usize << p.n_qubits;
    if dim > MAX_DENSE_DIM {
        return Err(QjdError::Capacity {
            what: format!("dense Pauli matrix on {} qubits", p.n_qubits),
            limit: MAX_DENSE_DIM,
        });
    }
    let mut data = vec![ZERO; dim * dim];
    for col in 0..dim {
        let row = col ^ p.x as usize;
        data[row * dim + col] = p.element(row, col);
    }
    Ok(DenseHermitian::from_parts(dim, data))
}

/// Weighted sum of Pauli strings over a common qubit count, with no
/// repeated strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    /// Duplicates are merged (coefficients summed) in first-appearance order.
    /// Zero coefficients are kept; use [`PauliSum::pruned`] to drop them.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (Complex64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QjdError::Shape(format!("unsupported qubit count {n_qubits}")));
        }
        let mut merged: IndexMap<PauliString, Complex64> = IndexMap::new();
        for (c, p) in terms {
            if p.n_qubits != n_qubits {
                return Err(QjdError::Shape(format!(
                    "term {p} acts on {} qubits, expected {n_qubits}",
                    p.n_qubits
                )));
            }
            *merged.entry(p).or_insert(ZERO) += c;
        }
        Ok(PauliSum {
            n_qubits,
            terms: merged.into_iter().map(|(p, c)| (c, p)).collect(),
        })
    }

    /// Convenience constructor from real coefficients and labels.
    pub fn from_labels<'a>(terms: impl IntoIterator<Item = (f64, &'a str)>) -> Result<Self> {
        let parsed: Vec<(Complex64, PauliString)> = terms
            .into_iter()
            .map(|(c, l)| Ok((Complex64::new(c, 0.0), l.parse::<PauliString>()?)))
            .collect::<Result<_>>()?;
        let n = parsed
            .first()
            .map(|(_, p)| p.n_qubits)
            .ok_or_else(|| QjdError::Shape("cannot infer qubit count of an empty sum".into()))?;
        Self::new(n, parsed)
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, std::iter::empty())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, q)| q == p)
            .map(|(c, _)| *c)
            .unwrap_or(ZERO)
    }

    /// All coefficients real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() <= tol)
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if let Some((c, p)) = self.terms.iter().find(|(c, _)| c.im.abs() > HERMITIAN_COEFF_TOL) {
            return Err(QjdError::Validation(format!(
                "coefficient {c} of {p} is not real; operator is not Hermitian"
            )));
        }
        Ok(())
    }

    /// Terms with `|c| > tol` only.
    pub fn pruned(&self, tol: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().copied().filter(|(c, _)| c.norm() > tol).collect(),
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|&(c, p)| (alpha * c, p)).collect(),
        }
    }

    /// `self + other`, merging shared strings.
    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        PauliSum::new(
            self.n_qubits,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    /// Diagonal of the operator, assembled from its `I`/`Z` terms.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut diag = vec![0.0; dim];
        for (c, p) in self.terms.iter().filter(|(_, p)| p.is_diagonal()) {
            for (j, d) in diag.iter_mut().enumerate() {
                *d += (c * p.element(j, j)).re;
            }
        }
        diag
    }

    /// Matrix element `⟨row|A|col⟩`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.terms.iter().map(|(c, p)| c * p.element(row, col)).sum()
    }

    /// `A v`, matrix-free.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        for (c, p) in &self.terms {
            p.apply_accumulate(*c, v, &mut out);
        }
        out
    }

    /// Dense materialization (Hermitian sums only).
    pub fn to_dense(&self) -> Result<DenseHermitian> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(QjdError::Capacity {
                what: format!("dense materialization on {} qubits", self.n_qubits),
                limit: MAX_DENSE_DIM,
            });
        }
        self.require_hermitian()?;
        let mut data = vec![ZERO; dim * dim];
        for (c, p) in &self.terms {
            let c = Complex64::new(c.re, 0.0);
            for col in 0..dim {
                let row = col ^ p.x as usize;
                data[row * dim + col] += c * p.element(row, col);
            }
        }
        Ok(DenseHermitian::from_parts(dim, data))
    }

    /// Parses the text format: `<real> <imag> <label>` per line, `#` comments.
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<PauliSum> {
        let mut terms = Vec::new();
        let mut width: Option<(usize, usize)> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| QjdError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(QjdError::Parse {
                    line: lineno,
                    message: format!("expected `<real> <imag> <label>`, got {} fields", fields.len()),
                });
            }
            let parse_f = |s: &str| {
                s.parse::<f64>().map_err(|e| QjdError::Parse {
                    line: lineno,
                    message: format!("bad coefficient '{s}': {e}"),
                })
            };
            let re = parse_f(fields[0])?;
            let im = parse_f(fields[1])?;
            let p: PauliString = fields[2].parse().map_err(|e: QjdError| QjdError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            match width {
                None => width = Some((p.n_qubits, lineno)),
                Some((n, first)) if n != p.n_qubits => {
                    return Err(QjdError::Shape(format!(
                        "line {lineno}: label length {} differs from {n} (line {first})",
                        p.n_qubits
                    )));
                }
                _ => {}
            }
            terms.push((Complex64::new(re, im), p));
        }
        let (n, _) = width.ok_or_else(|| QjdError::Parse {
            line: 0,
            message: "no Pauli terms found".into(),
        })?;
        PauliSum::new(n, terms)
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        for (c, p) in &self.terms {
            writeln!(w, "{} {} {}", c.re, c.im, p)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("output is ASCII")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PauliSum> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| QjdError::io(path, e))?;
        Self::read(std::io::BufReader::new(file))
    }
}

/// Number of terms with `|c| > tol`.
pub fn pauli_term_count(ps: &PauliSum, tol: f64) -> usize {
    ps.terms.iter().filter(|(c, _)| c.norm() > tol).count()
}

/// Visits every Pauli coefficient `Tr(P M)/2ⁿ` of a dense matrix.
///
/// For a fixed X-mask `x` the coefficients over all Z-masks are a
/// Walsh–Hadamard transform of the shifted diagonal `k ↦ M[k, k⊕x]`, so the
/// full decomposition costs `O(4ⁿ n)` instead of `O(8ⁿ)`.
fn for_each_coefficient(m: &DenseHermitian, mut visit: impl FnMut(u64, u64, Complex64)) {
    let dim = m.dim();
    let inv = 1.0 / dim as f64;
    let mut buf = vec![ZERO; dim];
    for x in 0..dim {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = m.get(k, k ^ x);
        }
        walsh_hadamard(&mut buf);
        for (z, b) in buf.iter().enumerate() {
            let y_phase = match (x & z).count_ones() % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            visit(x as u64, z as u64, y_phase * b * inv);
        }
    }
}

/// Pauli-basis decomposition `M = Σ cᵢ Pᵢ` with `|cᵢ| ≤ tol` dropped.
/// Coefficients of a Hermitian matrix are real; the imaginary parts left by
/// rounding are discarded before the tolerance test.
pub fn decompose_hermitian(m: &DenseHermitian, tol: f64) -> PauliSum {
    let n = m.n_qubits();
    let mut terms = Vec::new();
    for_each_coefficient(m, |x, z, c| {
        if c.re.abs() > tol {
            terms.push((Complex64::new(c.re, 0.0), PauliString { n_qubits: n, x, z }));
        }
    });
    PauliSum { n_qubits: n, terms }
}

/// Same count as `pauli_term_count(&decompose_hermitian(m, 0.0), tol)`
/// without materializing the terms.
pub fn decomposition_term_count(m: &DenseHermitian, tol: f64) -> usize {
    let mut count = 0;
    for_each_coefficient(m, |_, _, c| {
        if c.re.abs() > tol {
            count += 1;
        }
    });
    count
}

/// Pauli decomposition of a diagonal operator; only `I`/`Z` strings appear.
pub fn decompose_diagonal(diag: &[f64], tol: f64) -> Result<PauliSum> {
    let dim = diag.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QjdError::Shape(format!("diagonal length {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    let mut buf: Vec<Complex64> = diag.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    walsh_hadamard(&mut buf);
    let inv = 1.0 / dim as f64;
    let terms = buf
        .into_iter()
        .enumerate()
        .filter_map(|(z, c)| {
            let c = c.re * inv;
            (c.abs() > tol).then(|| {
                (
                    Complex64::new(c, 0.0),
                    PauliString { n_qubits: n, x: 0, z: z as u64 },
                )
            })
        })
        .collect();
    Ok(PauliSum { n_qubits: n, terms })
}

/// `A = Σ αᵢ Uᵢ` with `αᵢ ≥ 0` and each `Uᵢ = phaseᵢ · Pᵢ` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryCombination {
    n_qubits: usize,
    weights: Vec<f64>,
    unitaries: Vec<(Complex64, PauliString)>,
    s: f64,
}

impl UnitaryCombination {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(phase, string)` pairs; every phase has unit modulus.
    pub fn unitaries(&self) -> &[(Complex64, PauliString)] {
        &self.unitaries
    }

    /// Normalization `s = Σ αᵢ`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `⌈log₂ m⌉` ancilla qubits index the `m` unitaries.
    pub fn ancilla_qubits(&self) -> usize {
        let m = self.len();
        if m <= 1 {
            0
        } else {
            (usize::BITS - (m - 1).leading_zeros()) as usize
        }
    }

    /// `Uᵢ v`.
    pub fn apply_unitary(&self, i: usize, v: &[Complex64]) -> Vec<Complex64> {
        let (phase, p) = self.unitaries[i];
        let mut out = vec![ZERO; v.len()];
        p.apply_accumulate(phase, v, &mut out);
        out
    }

    /// `Σ αᵢ Uᵢ v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        for (a, (phase, p)) in self.weights.iter().zip(&self.unitaries) {
            p.apply_accumulate(phase * *a, v, &mut out);
        }
        out
    }
}

/// Splits each coefficient as `|cᵢ| · (cᵢ/|cᵢ|)`, absorbing the phase into the unitary.
pub fn to_unitary_combination(ps: &PauliSum) -> Result<UnitaryCombination> {
    let mut weights = Vec::new();
    let mut unitaries = Vec::new();
    for (c, p) in &ps.terms {
        let a = c.norm();
        if a == 0.0 {
            continue;
        }
        weights.push(a);
        unitaries.push((c / a, *p));
    }
    if weights.is_empty() {
        return Err(QjdError::DegenerateOperator);
    }
    let s = weights.iter().sum();
    Ok(UnitaryCombination {
        n_qubits: ps.n_qubits,
        weights,
        unitaries,
        s,
    })
}
