//! Subspace eigensolvers of the Jacobi–Davidson family, with exact
//! statevector simulations of the quantum subroutines they call: LCU
//! application, Pauli expectation measurement and Hadamard tests.
//!
//! The crate is organized bottom up: [`pauli`] and [`dense`] hold operators,
//! [`models`] builds the benchmark Hamiltonians, [`kernels`] simulates the
//! circuits, [`subspace`] does Rayleigh–Ritz, and [`solvers`] runs the loop.

pub mod dense;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod operator;
pub mod pauli;
pub mod solvers;
pub mod sqdiag;
pub mod state;
pub mod subspace;
pub mod vecops;

pub use num_complex::Complex64;

pub use dense::DenseHermitian;
pub use error::{QjdError, Result};
pub use kernels::LcuOutcome;
pub use models::{DdMatrixSpec, IsingSpec};
pub use operator::Hamiltonian;
pub use pauli::{PauliString, PauliSum, UnitaryCombination};
pub use solvers::{
    ConvergenceTrace, IterationRecord, Method, MethodLabel, PreconditionerKind, SolverConfig, SolverRun,
    TerminalStatus,
};
pub use sqdiag::{SamplingMode, SqdiagResult};
pub use state::StateVector;
pub use subspace::{RitzPair, Subspace};
