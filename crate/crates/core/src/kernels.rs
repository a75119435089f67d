//! Exact statevector simulations of the three circuit primitives: LCU
//! application with ancilla postselection, Pauli expectation by basis-change
//! measurement, and the Hadamard test for `Re⟨u|P|w⟩`.

use num_complex::Complex64;

use crate::error::{QjdError, Result};
use crate::pauli::{to_unitary_combination, PauliString, PauliSum};
use crate::state::StateVector;
use crate::vecops::{self, CompensatedSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative size of `‖A v‖ / s` below which the postselected state is treated as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-14;

fn check_qubits(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(QjdError::Shape(format!("operator on {expected} qubits applied to a {got}-qubit state")));
    }
    Ok(())
}

/// `Σ cᵢ Pᵢ v`, matrix free.
pub fn apply_pauli_sum(a: &PauliSum, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != a.dim() {
        return Err(QjdError::Shape(format!("vector of length {} for a {}-qubit operator", v.len(), a.n_qubits())));
    }
    Ok(a.apply(v))
}

/// Result of one postselected LCU application.
#[derive(Debug, Clone)]
pub struct LcuOutcome {
    pub state: StateVector,
    pub success_probability: f64,
    pub s: f64,
    /// Squared norm of the composite state outside the ancilla `|0…0⟩` block.
    pub rejected_weight: f64,
    pub ancilla_qubits: usize,
}

/// Simulates PR · SELECT · PR† on `ancilla ⊗ data` and projects the ancilla onto zero.
///
/// PR is the real Householder reflector sending `|0⟩` to `Σ √(αᵢ/s)|i⟩`. Since
/// it is a rank-one update of the identity, each ancilla block of the final
/// composite state is `φ_k − 2 y_k g / ‖y‖²` with `φ_k = √(α_k/s) U_k v` and
/// `g = Σ yᵢ φᵢ`, so the register is streamed block by block instead of stored.
pub fn lcu_apply(a: &PauliSum, v: &StateVector) -> Result<LcuOutcome> {
    check_qubits(a.n_qubits(), v.n_qubits())?;
    let lcu = to_unitary_combination(a)?;
    let m = lcu.len();
    let s = lcu.s();
    let p: Vec<f64> = lcu.weights().iter().map(|w| (w / s).sqrt()).collect();
    let mut y: Vec<f64> = p.iter().map(|x| -x).collect();
    y[0] += 1.0;
    let y_norm_sqr: f64 = y.iter().map(|x| x * x).sum();
    let amps = v.amplitudes();
    let phi = |k: usize| vecops::scaled(Complex64::new(p[k], 0.0), &lcu.apply_unitary(k, amps));

    let reflect = y_norm_sqr > 1e-300;
    let mut g = vec![ZERO; amps.len()];
    if reflect {
        for k in 0..m {
            if y[k] != 0.0 {
                vecops::axpy(Complex64::new(y[k], 0.0), &phi(k), &mut g);
            }
        }
    }
    let block = |k: usize, phi_k: Vec<Complex64>| -> Vec<Complex64> {
        let mut out = phi_k;
        if reflect && y[k] != 0.0 {
            vecops::axpy(Complex64::new(-2.0 * y[k] / y_norm_sqr, 0.0), &g, &mut out);
        }
        out
    };

    let projected = block(0, phi(0));
    let mut rejected = CompensatedSum::default();
    for k in 1..m {
        rejected.add(vecops::norm_sqr(&block(k, phi(k))));
    }

    let success_probability = vecops::norm_sqr(&projected);
    if success_probability.sqrt() <= ANNIHILATION_TOL {
        return Err(QjdError::DegenerateOutcome { success_probability });
    }
    Ok(LcuOutcome {
        state: StateVector::normalized(projected)?,
        success_probability,
        s,
        rejected_weight: rejected.value(),
        ancilla_qubits: lcu.ancilla_qubits(),
    })
}

fn apply_single_qubit(state: &mut [Complex64], bit: usize, gate: [[Complex64; 2]; 2]) {
    let mask = 1usize << bit;
    for j in 0..state.len() {
        if j & mask == 0 {
            let a0 = state[j];
            let a1 = state[j | mask];
            state[j] = gate[0][0] * a0 + gate[0][1] * a1;
            state[j | mask] = gate[1][0] * a0 + gate[1][1] * a1;
        }
    }
}

fn hadamard_gate() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `H · S†`, which maps the Y eigenbasis onto the computational basis.
fn y_basis_gate() -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
    ]
}

/// `⟨v|P|v⟩` from outcome probabilities after rotating every X/Y qubit to the Z basis.
pub fn expectation_pauli(p: &PauliString, v: &StateVector) -> Result<f64> {
    check_qubits(p.n_qubits(), v.n_qubits())?;
    if p.is_identity() {
        return Ok(1.0);
    }
    let mut state = v.amplitudes().to_vec();
    for bit in 0..p.n_qubits() {
        match p.letter_at_bit(bit) {
            'X' => apply_single_qubit(&mut state, bit, hadamard_gate()),
            'Y' => apply_single_qubit(&mut state, bit, y_basis_gate()),
            _ => {}
        }
    }
    let support = p.support() as usize;
    Ok(state
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let prob = a.norm_sqr();
            if (j & support).count_ones().is_multiple_of(2) {
                prob
            } else {
                -prob
            }
        })
        .collect::<CompensatedSum>()
        .value())
}

/// `Σ cᵢ ⟨v|Pᵢ|v⟩` for a Hermitian (real-coefficient) sum.
pub fn expectation_sum(b: &PauliSum, v: &StateVector) -> Result<f64> {
    b.require_hermitian()?;
    check_qubits(b.n_qubits(), v.n_qubits())?;
    let mut acc = CompensatedSum::default();
    for (c, p) in b.terms() {
        if c.re != 0.0 {
            acc.add(c.re * expectation_pauli(p, v)?);
        }
    }
    Ok(acc.value())
}

/// A unitary whose first column is a given state.
pub trait StatePreparation {
    fn n_qubits(&self) -> usize;
    /// `U x`
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    /// `U† x`
    fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64>;
}

/// `U = e^{iφ} (I − 2 y y†/‖y‖²)` with `y = e^{iφ}|0⟩ − w` and `φ = arg w₀`.
#[derive(Debug, Clone)]
pub struct HouseholderPreparation {
    n_qubits: usize,
    phase: Complex64,
    y: Vec<Complex64>,
    y_norm_sqr: f64,
}

impl HouseholderPreparation {
    pub fn new(w: &StateVector) -> Self {
        let amps = w.amplitudes();
        let phase = if amps[0].norm() > 0.0 {
            amps[0] / amps[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut y: Vec<Complex64> = amps.iter().map(|a| -a).collect();
        y[0] += phase;
        let y_norm_sqr = vecops::norm_sqr(&y);
        HouseholderPreparation {
            n_qubits: w.n_qubits(),
            phase,
            y,
            y_norm_sqr,
        }
    }

    fn reflect(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = x.to_vec();
        if self.y_norm_sqr > 1e-300 {
            let coeff = -2.0 * vecops::inner(&self.y, x) / self.y_norm_sqr;
            vecops::axpy(coeff, &self.y, &mut out);
        }
        out
    }
}

impl StatePreparation for HouseholderPreparation {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        vecops::scaled(self.phase, &self.reflect(x))
    }

    fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        vecops::scaled(self.phase.conj(), &self.reflect(x))
    }
}

/// Hadamard test with explicit preparation unitaries.
///
/// The ancilla-0 branch leaves the data register in `|0⟩`; the ancilla-1
/// branch carries `U_u† P U_w |0⟩`. After the closing Hadamard,
/// `P(0) = ‖(|0⟩ + U_u† P U_w|0⟩)/2‖²`.
pub fn hadamard_test_with(u_prep: &impl StatePreparation, p: &PauliString, w_prep: &impl StatePreparation) -> Result<f64> {
    check_qubits(p.n_qubits(), u_prep.n_qubits())?;
    check_qubits(p.n_qubits(), w_prep.n_qubits())?;
    let dim = 1usize << p.n_qubits();
    let mut zero = vec![ZERO; dim];
    zero[0] = Complex64::new(1.0, 0.0);
    let branch1 = u_prep.apply_adjoint(&p.apply(&w_prep.apply(&zero)));
    let mut plus = branch1;
    plus[0] += Complex64::new(1.0, 0.0);
    let p0 = 0.25 * vecops::norm_sqr(&plus);
    Ok(2.0 * p0 - 1.0)
}

/// `Re⟨u|P|w⟩` via the Hadamard test.
pub fn hadamard_test_re(u: &StateVector, p: &PauliString, w: &StateVector) -> Result<f64> {
    check_qubits(u.n_qubits(), w.n_qubits())?;
    hadamard_test_with(&HouseholderPreparation::new(u), p, &HouseholderPreparation::new(w))
}

/// `Re⟨u|B|w⟩` for unnormalized `w`: Hadamard tests on `ŵ`, rescaled by `‖w‖`.
/// A zero `w` gives zero.
pub fn overlap_sum(b: &PauliSum, u: &StateVector, w: &[Complex64]) -> Result<f64> {
    b.require_hermitian()?;
    check_qubits(b.n_qubits(), u.n_qubits())?;
    if w.len() != u.dim() {
        return Err(QjdError::Shape(format!("vector of length {} for {} qubits", w.len(), u.n_qubits())));
    }
    let w_norm = vecops::norm(w);
    if w_norm == 0.0 {
        return Ok(0.0);
    }
    let w_hat = StateVector::normalized(w.to_vec())?;
    let u_prep = HouseholderPreparation::new(u);
    let w_prep = HouseholderPreparation::new(&w_hat);
    let mut acc = CompensatedSum::default();
    for (c, p) in b.terms() {
        if c.re != 0.0 {
            acc.add(c.re * hadamard_test_with(&u_prep, p, &w_prep)?);
        }
    }
    Ok(acc.value() * w_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::basis_state;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> StateVector {
        StateVector::normalized(vec![c(1.0), c(1.0)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let v = basis_state(0, 1).unwrap();
        let x = PauliSum::from_labels([(1.0, "X")]).unwrap();
        assert_eq!(apply_pauli_sum(&x, v.amplitudes()).unwrap(), vec![c(0.0), c(1.0)]);
        let a = PauliSum::from_labels([(0.5, "Z"), (0.5, "X")]).unwrap();
        assert_eq!(apply_pauli_sum(&a, v.amplitudes()).unwrap(), vec![c(0.5), c(0.5)]);
        assert!(apply_pauli_sum(&a, &[c(1.0); 4]).is_err());
    }

    #[test]
    fn lcu_identity() {
        let a = PauliSum::from_labels([(1.0, "II")]).unwrap();
        let v = StateVector::normalized(vec![c(1.0), c(2.0), c(-1.0), c(0.5)]).unwrap();
        let out = lcu_apply(&a, &v).unwrap();
        assert_eq!(out.s, 1.0);
        assert!((out.success_probability - 1.0).abs() < 1e-15);
        assert!(vecops::max_abs_diff(out.state.amplitudes(), v.amplitudes()) < 1e-15);
        assert_eq!(out.ancilla_qubits, 0);
    }

    #[test]
    fn lcu_two_terms() {
        let a = PauliSum::from_labels([(0.5, "Z"), (0.5, "X")]).unwrap();
        let out = lcu_apply(&a, &basis_state(0, 1).unwrap()).unwrap();
        assert!((out.s - 1.0).abs() < 1e-15);
        assert!((out.success_probability - 0.5).abs() < 1e-12);
        assert!(vecops::max_abs_diff(out.state.amplitudes(), plus().amplitudes()) < 1e-12);
        assert!((out.success_probability + out.rejected_weight - 1.0).abs() < 1e-12);
        assert_eq!(out.ancilla_qubits, 1);
    }

    #[test]
    fn lcu_annihilated_input() {
        // (I - Z)/2 projects onto |1⟩ and kills |0⟩.
        let a = PauliSum::from_labels([(0.5, "I"), (-0.5, "Z")]).unwrap();
        match lcu_apply(&a, &basis_state(0, 1).unwrap()) {
            Err(QjdError::DegenerateOutcome { success_probability }) => assert!(success_probability < 1e-28),
            other => panic!("expected degenerate outcome, got {other:?}"),
        }
    }

    #[test]
    fn expectation_examples() {
        let z: PauliString = "Z".parse().unwrap();
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let zero = basis_state(0, 1).unwrap();
        assert!((expectation_pauli(&z, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation_pauli(&x, &plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation_pauli(&y, &zero).unwrap().abs() < 1e-15);
        let plus_i = StateVector::normalized(vec![c(1.0), Complex64::i()]).unwrap();
        assert!((expectation_pauli(&y, &plus_i).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_sum_examples() {
        let two = PauliSum::from_labels([(2.0, "I")]).unwrap();
        assert!((expectation_sum(&two, &plus()).unwrap() - 2.0).abs() < 1e-15);
        let z = PauliSum::from_labels([(1.0, "Z")]).unwrap();
        assert!(expectation_sum(&z, &plus()).unwrap().abs() < 1e-15);
        let ising = crate::models::build_ising(&crate::models::IsingSpec { n_sites: 2, j: 1.1, h: 0.9, g: 0.0 }).unwrap();
        assert!((expectation_sum(&ising, &basis_state(0, 2).unwrap()).unwrap() + 4.0).abs() < 1e-12);
        let complex = PauliSum::new(1, [(Complex64::new(0.0, 1.0), "Z".parse().unwrap())]).unwrap();
        assert!(matches!(expectation_sum(&complex, &plus()), Err(QjdError::Validation(_))));
    }

    #[test]
    fn hadamard_examples() {
        let z: PauliString = "Z".parse().unwrap();
        let zero = basis_state(0, 1).unwrap();
        let one = basis_state(1, 1).unwrap();
        assert!((hadamard_test_re(&zero, &z, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(hadamard_test_re(&zero, &z, &one).unwrap().abs() < 1e-15);
    }

    #[test]
    fn householder_first_column() {
        let w = StateVector::normalized(vec![Complex64::new(0.3, -0.4), c(0.1), Complex64::new(0.0, 0.7), c(-0.2)]).unwrap();
        let prep = HouseholderPreparation::new(&w);
        let mut e0 = vec![ZERO; 4];
        e0[0] = c(1.0);
        assert!(vecops::max_abs_diff(&prep.apply(&e0), w.amplitudes()) < 1e-15);
        assert!(vecops::max_abs_diff(&prep.apply_adjoint(w.amplitudes()), &e0) < 1e-15);
        let w0 = basis_state(3, 2).unwrap();
        let prep = HouseholderPreparation::new(&w0);
        assert!(vecops::max_abs_diff(&prep.apply(&e0), w0.amplitudes()) < 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let id = PauliSum::from_labels([(1.0, "I")]).unwrap();
        assert_eq!(overlap_sum(&id, &plus(), &[ZERO, ZERO]).unwrap(), 0.0);
        assert!((overlap_sum(&id, &plus(), plus().amplitudes()).unwrap() - 1.0).abs() < 1e-15);
        let w = vec![c(3.0), c(-1.0)];
        let b = PauliSum::from_labels([(0.5, "Z"), (0.25, "X")]).unwrap();
        let direct = vecops::inner(plus().amplitudes(), &b.apply(&w)).re;
        assert!((overlap_sum(&b, &plus(), &w).unwrap() - direct).abs() < 1e-14);
    }
}
