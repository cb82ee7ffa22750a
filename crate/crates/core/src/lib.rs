//! Exact statevector QAOA for binary optimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: QUBO/PUBO problems, constraint penalties, problem builders and
//!   the exhaustive brute-force oracle.
//! - [`ising`]: conversion of binary objectives to diagonal spin Hamiltonians,
//!   scaling and diagonalization.
//! - [`sim`]: the statevector engine with the QAOA gate set, dense-matrix
//!   oracles and the Trotterization checker.
//! - [`qaoa`]: circuit assembly, energies, gradients, landscapes and the
//!   restricted parameter domain.
//! - [`optimize`]: SPSA and gradient descent outer loops.
//! - [`verify`]: property suites exposed by the command-line tool.
//!
//! Conventions used throughout: qubit/variable 0 is the least-significant bit
//! of a basis index, bit value 0 is spin `s = +1` (`σ_z|0⟩ = +|0⟩`), and the
//! binary variable is recovered as `x = (1 + s) / 2`, so a measured bit `z_i`
//! decodes to `x_i = 1 - z_i`.

pub mod error;
pub mod ising;
pub mod model;
pub mod optimize;
pub mod qaoa;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use ising::SpinHamiltonian;
pub use model::{
    BinaryObjective, BruteForce, BruteForceResult, ConstraintKind, ConstraintSpec, Problem,
    PuboProblem, QuboProblem,
};
pub use optimize::{OptimizerConfig, RunRecord};
pub use qaoa::{QaoaCircuitSpec, QaoaParams};
pub use sim::StateVector;
