mod common;

use common::*;
use proptest::prelude::*;
use qjd_core::models::{build_dd_matrix, build_ising, exact_ground_pair, DdMatrixSpec, IsingSpec};
use qjd_core::operator::is_diagonally_dominant;
use qjd_core::pauli::{decompose_hermitian, DEFAULT_DROP_TOL};
use qjd_core::{Complex64, Hamiltonian};

fn ising(n: usize, g: f64) -> Hamiltonian {
    Hamiltonian::from_pauli(build_ising(&IsingSpec { n_sites: n, j: 1.1, h: 0.9, g }).unwrap()).unwrap()
}

fn check_ground_pair(h: &Hamiltonian) {
    let (e0, v0) = exact_ground_pair(h).unwrap();
    let hv = h.apply(v0.amplitudes());
    let r: Vec<Complex64> = hv.iter().zip(v0.amplitudes()).map(|(a, b)| a - b * e0).collect();
    let scale = h.dense().unwrap().one_norm().max(1.0);
    assert!(norm(&r) <= 1e-9 * scale, "residual {}", norm(&r));
    assert!((norm(v0.amplitudes()) - 1.0).abs() < 1e-12);
}

#[test]
fn ising_dense_decomposition_has_3n_terms() {
    for n in 3..=4 {
        let ps = build_ising(&IsingSpec { n_sites: n, j: 1.1, h: 0.9, g: 0.4 }).unwrap();
        let back = decompose_hermitian(&ps.to_dense().unwrap(), DEFAULT_DROP_TOL);
        assert_eq!(back.len(), 3 * n);
        for (c, p) in ps.terms() {
            assert!((back.coefficient(p) - c).norm() < 1e-12);
        }
    }
}

#[test]
fn ising_without_transverse_field_is_diagonal() {
    let ps = build_ising(&IsingSpec { n_sites: 5, j: 1.1, h: 0.9, g: 0.0 }).unwrap();
    assert!(ps.terms().iter().all(|(_, p)| p.is_diagonal()));
    assert!(is_diagonally_dominant(&ps.to_dense().unwrap()));
}

#[test]
fn ising_dominance_rows() {
    // Strong field: dominance fails broadly.
    let strong = ising(12, 1.0);
    assert!(!strong.is_diagonally_dominant());
    // Weak field: only configurations whose classical energy nearly cancels
    // (|H_ii| below the off-diagonal row sum 12g) break row dominance.
    let weak = ising(12, 0.01);
    let diag = weak.diagonal();
    let expected: Vec<usize> = (0..diag.len()).filter(|&i| diag[i].abs() < 12.0 * 0.01).collect();
    assert_eq!(weak.dominance_violations(), expected);
    assert!(expected.len() < diag.len() / 10);
    assert!(weak.dominance_violations().len() < strong.dominance_violations().len());
}

#[test]
fn ground_pairs_of_small_models() {
    for n in 2..=6 {
        check_ground_pair(&ising(n, 0.7));
    }
    for n in 2..=6 {
        let h = Hamiltonian::from_dense(build_dd_matrix(&DdMatrixSpec::new(n, vec![1, 1 << n])).unwrap());
        check_ground_pair(&h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dd_generation_is_deterministic_and_dominant(n in 1usize..=7, seed in any::<u64>(), k in 1usize..4) {
        let dim = 1usize << n;
        let minima: Vec<usize> = (0..k.min(dim)).map(|i| 1 + i * (dim - 1) / k.max(1)).collect();
        let mut minima = minima;
        minima.dedup();
        let mut spec = DdMatrixSpec::new(n, minima);
        spec.seed = seed;
        let a = build_dd_matrix(&spec).unwrap();
        let b = build_dd_matrix(&spec).unwrap();
        let bits = |m: &qjd_core::DenseHermitian| m.data().iter().map(|z| z.re.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
        prop_assert!(is_diagonally_dominant(&a));
    }

    #[test]
    fn ising_ground_pairs(n in 2usize..=6, j in -2.0f64..2.0, h in -2.0f64..2.0, g in -2.0f64..2.0) {
        let ham = Hamiltonian::from_pauli(build_ising(&IsingSpec { n_sites: n, j, h, g }).unwrap()).unwrap();
        check_ground_pair(&ham);
    }
}
