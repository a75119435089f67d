#![allow(dead_code)]

use proptest::prelude::*;
use qjd_core::models::{build_dd_matrix, DdMatrixSpec};
use qjd_core::{Complex64, Hamiltonian, PauliString, PauliSum, StateVector};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense Pauli string built from Kronecker products of the 2×2 matrices,
/// leftmost letter as the most significant factor.
pub fn kron_pauli(label: &str) -> Vec<Vec<Complex64>> {
    let i = Complex64::i();
    let one = c(1.0);
    let zero = c(0.0);
    let mut m = vec![vec![one]];
    for ch in label.chars() {
        let p = match ch {
            'I' => [[one, zero], [zero, one]],
            'X' => [[zero, one], [one, zero]],
            'Y' => [[zero, -i], [i, zero]],
            'Z' => [[one, zero], [zero, -one]],
            _ => panic!("bad letter"),
        };
        let d = m.len();
        let mut out = vec![vec![zero; 2 * d]; 2 * d];
        for a in 0..d {
            for b in 0..d {
                for x in 0..2 {
                    for y in 0..2 {
                        out[2 * a + x][2 * b + y] = m[a][b] * p[x][y];
                    }
                }
            }
        }
        m = out;
    }
    m
}

pub fn dense_of_sum(ps: &PauliSum) -> Vec<Vec<Complex64>> {
    let d = ps.dim();
    let mut out = vec![vec![c(0.0); d]; d];
    for (coef, p) in ps.terms() {
        let m = kron_pauli(&p.label());
        for a in 0..d {
            for b in 0..d {
                out[a][b] += coef * m[a][b];
            }
        }
    }
    out
}

pub fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)`
pub fn alignment(a: &[Complex64], b: &[Complex64]) -> f64 {
    dot(a, b).norm() / (norm(a) * norm(b))
}

pub fn all_labels(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| ['I', 'X', 'Y', 'Z'].into_iter().map(move |ch| format!("{s}{ch}")))
            .collect();
    }
    out
}

pub fn arb_amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

pub fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
    arb_amplitudes(n).prop_map(|v| StateVector::normalized(v).unwrap())
}

pub fn arb_label(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect::<String>().parse().unwrap())
}

/// Hermitian Pauli sum (real coefficients) with up to `max_terms` terms.
pub fn arb_hermitian_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((arb_label(n), -2.0f64..2.0), 1..=max_terms)
        .prop_map(move |terms| PauliSum::new(n, terms.into_iter().map(|(p, x)| (c(x), p))).unwrap())
}

/// General Pauli sum with complex coefficients.
pub fn arb_complex_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((arb_label(n), -2.0f64..2.0, -2.0f64..2.0), 1..=max_terms).prop_map(move |terms| {
        PauliSum::new(n, terms.into_iter().map(|(p, x, y)| (Complex64::new(x, y), p))).unwrap()
    })
}

/// Seeded diagonally dominant instance with a random set of minima.
pub fn dd_instance(n: usize, seed: u64, minima: Vec<usize>) -> Hamiltonian {
    let mut spec = DdMatrixSpec::new(n, minima);
    spec.seed = seed;
    Hamiltonian::from_dense(build_dd_matrix(&spec).unwrap())
}

pub fn arb_dd_instance() -> impl Strategy<Value = (Hamiltonian, StateVector)> {
    (2usize..=5, any::<u64>()).prop_flat_map(|(n, seed)| {
        let dim = 1usize << n;
        (Just(n), Just(seed), 1..=dim, arb_state(n))
            .prop_map(|(n, seed, min, v)| (dd_instance(n, seed, vec![min]), v))
    })
}
