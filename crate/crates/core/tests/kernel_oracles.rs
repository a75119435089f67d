mod common;

use common::*;
use proptest::prelude::*;
use qjd_core::kernels::{
    apply_pauli_sum, expectation_pauli, expectation_sum, hadamard_test_re, hadamard_test_with, lcu_apply, overlap_sum,
    HouseholderPreparation, StatePreparation,
};
use qjd_core::{Complex64, PauliString, StateVector};

/// A different completion of the same first column: Gram–Schmidt over the
/// standard basis, stored densely.
struct GramSchmidtPreparation {
    n_qubits: usize,
    columns: Vec<Vec<Complex64>>,
}

impl GramSchmidtPreparation {
    fn new(w: &StateVector) -> Self {
        let dim = w.dim();
        let mut columns = vec![w.amplitudes().to_vec()];
        for k in 0..dim {
            if columns.len() == dim {
                break;
            }
            let mut e = vec![c(0.0); dim];
            e[k] = c(1.0);
            for _ in 0..2 {
                for col in &columns {
                    let p = dot(col, &e);
                    for (x, y) in e.iter_mut().zip(col) {
                        *x -= p * y;
                    }
                }
            }
            let nrm = norm(&e);
            if nrm > 1e-8 {
                columns.push(e.iter().map(|x| x / nrm).collect());
            }
        }
        GramSchmidtPreparation { n_qubits: w.n_qubits(), columns }
    }
}

impl StatePreparation for GramSchmidtPreparation {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0); x.len()];
        for (xk, col) in x.iter().zip(&self.columns) {
            for (o, y) in out.iter_mut().zip(col) {
                *o += xk * y;
            }
        }
        out
    }

    fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.columns.iter().map(|col| dot(col, x)).collect()
    }
}

#[test]
fn expectation_matches_dense_for_all_strings() {
    for n in 1..=3 {
        let amps: Vec<Complex64> = (0..1 << n).map(|k| Complex64::new(0.3 + k as f64, 0.7 - 0.4 * k as f64)).collect();
        let v = StateVector::normalized(amps).unwrap();
        for label in all_labels(n) {
            let p: PauliString = label.parse().unwrap();
            let dense = dot(v.amplitudes(), &matvec(&kron_pauli(&label), v.amplitudes())).re;
            let circuit = expectation_pauli(&p, &v).unwrap();
            assert!((dense - circuit).abs() < 1e-12, "{label}: {dense} vs {circuit}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lcu_matches_direct_application(
        (a, v) in (1usize..=6).prop_flat_map(|n| (arb_complex_sum(n, 16), arb_state(n)))
    ) {
        let av = matvec(&dense_of_sum(&a), v.amplitudes());
        prop_assert!(norm(&apply_pauli_sum(&a, v.amplitudes()).unwrap().iter().zip(&av).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-12);
        let s: f64 = a.terms().iter().map(|(c, _)| c.norm()).sum();
        prop_assume!(s > 0.0 && norm(&av) > 1e-6 * s);
        let out = lcu_apply(&a, &v).unwrap();
        prop_assert!((out.s - s).abs() < 1e-12);
        prop_assert!((out.success_probability - norm(&av).powi(2) / (s * s)).abs() < 1e-12);
        prop_assert!(alignment(out.state.amplitudes(), &av) >= 1.0 - 1e-10);
        // The projected state is Av/s exactly, not just parallel to it.
        let scaled: Vec<Complex64> = out.state.amplitudes().iter().map(|x| x * (s * out.success_probability.sqrt())).collect();
        prop_assert!(norm(&scaled.iter().zip(&av).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-10 * norm(&av).max(1.0));
        // The composite register stays normalized.
        prop_assert!((out.success_probability + out.rejected_weight - 1.0).abs() < 1e-12);
        let m = a.terms().iter().filter(|(c, _)| c.norm() > 0.0).count();
        prop_assert_eq!(out.ancilla_qubits, (m as f64).log2().ceil() as usize);
    }

    #[test]
    fn hadamard_test_matches_dense_overlap(
        (u, p, w) in (1usize..=5).prop_flat_map(|n| (arb_state(n), arb_label(n), arb_state(n)))
    ) {
        let dense = dot(u.amplitudes(), &matvec(&kron_pauli(&p.label()), w.amplitudes())).re;
        let circuit = hadamard_test_re(&u, &p, &w).unwrap();
        prop_assert!((dense - circuit).abs() < 1e-10);
        let swapped = hadamard_test_re(&w, &p, &u).unwrap();
        prop_assert!((swapped - circuit).abs() < 1e-12);
        let other = hadamard_test_with(&GramSchmidtPreparation::new(&u), &p, &GramSchmidtPreparation::new(&w)).unwrap();
        prop_assert!((other - circuit).abs() < 1e-10);
        let mixed = hadamard_test_with(&HouseholderPreparation::new(&u), &p, &GramSchmidtPreparation::new(&w)).unwrap();
        prop_assert!((mixed - circuit).abs() < 1e-10);
    }

    #[test]
    fn overlap_sum_matches_dense(
        (b, u, w) in (1usize..=5).prop_flat_map(|n| (arb_hermitian_sum(n, 10), arb_state(n), arb_amplitudes(n)))
    ) {
        let dense = dot(u.amplitudes(), &matvec(&dense_of_sum(&b), &w)).re;
        prop_assert!((overlap_sum(&b, &u, &w).unwrap() - dense).abs() < 1e-10 * norm(&w).max(1.0));
    }

    #[test]
    fn expectation_sum_matches_dense(
        (b, v) in (1usize..=6).prop_flat_map(|n| (arb_hermitian_sum(n, 12), arb_state(n)))
    ) {
        let dense = dot(v.amplitudes(), &matvec(&dense_of_sum(&b), v.amplitudes())).re;
        prop_assert!((expectation_sum(&b, &v).unwrap() - dense).abs() < 1e-10);
    }
}
