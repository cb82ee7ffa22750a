//! Statevector simulation of the QAOA gate set.
//!
//! Amplitude `z` of an `n`-qubit state is the coefficient of the basis state
//! whose qubit `q` is bit `q` of `z` (little-endian). Matrix displays written
//! as `A ⊗ B` with the first factor on qubit 0 therefore correspond to
//! `B ⊗ A` in the usual Kronecker layout; [`dense`] builds operators in the
//! little-endian layout directly.

pub mod dense;
mod dump;
mod gate;
mod state;
mod trotter;

pub use dump::{read_dump, write_dump, DumpHeader, DUMP_CONVENTION};
pub use gate::GateMatrix;
pub use state::{Histogram, StateVector};
pub use trotter::{trotter_error, trotter_product, trotter_reference, DEFAULT_REFERENCE_STEPS, TROTTER_MAX_QUBITS};

/// Largest supported register (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;
