//! Dense-matrix oracles for small registers.
//!
//! Operators are built from Kronecker products in little-endian layout:
//! qubit 0 is the last (fastest-varying) factor. These routines are slow and
//! exist to cross-check the statevector kernels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};

pub const DENSE_MAX_QUBITS: usize = 8;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

fn check(n: usize) -> Result<()> {
    if n == 0 || n > DENSE_MAX_QUBITS {
        Err(Error::TooLarge {
            size: n,
            cap: DENSE_MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// Unitary of a state-vector routine, column `z` being its image of `|z>`.
pub fn kernel_unitary(n: usize, f: impl Fn(&mut StateVector) -> Result<()>) -> Result<CMatrix> {
    check(n)?;
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for z in 0..dim {
        let mut s = StateVector::basis(n, z as u64)?;
        f(&mut s)?;
        for (r, a) in s.amplitudes().iter().enumerate() {
            m[(r, z)] = *a;
        }
    }
    Ok(m)
}

/// `g` acting on qubit `q` of `n`.
pub fn embed_1q(n: usize, q: usize, g: &RMatrix) -> RMatrix {
    let hi = RMatrix::identity(1 << (n - q - 1), 1 << (n - q - 1));
    let lo = RMatrix::identity(1 << q, 1 << q);
    hi.kronecker(g).kronecker(&lo)
}

pub fn sigma_x() -> RMatrix {
    RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_z() -> RMatrix {
    RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn pauli_x(n: usize, q: usize) -> RMatrix {
    embed_1q(n, q, &sigma_x())
}

pub fn pauli_z(n: usize, q: usize) -> RMatrix {
    embed_1q(n, q, &sigma_z())
}

/// `σ_z^{i1} ... σ_z^{ik}` as a matrix product.
pub fn z_string(n: usize, qubits: &[usize]) -> RMatrix {
    qubits
        .iter()
        .fold(RMatrix::identity(1 << n, 1 << n), |acc, &q| acc * pauli_z(n, q))
}

/// `|0><0|_c ⊗ I + |1><1|_c ⊗ X_t`.
pub fn cnot(n: usize, control: usize, target: usize) -> RMatrix {
    let p0 = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let p1 = RMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    embed_1q(n, control, &p0) + embed_1q(n, control, &p1) * pauli_x(n, target)
}

/// Mixer `-Σ_q σ_x^q`.
pub fn mixer_hamiltonian(n: usize) -> RMatrix {
    let dim = 1 << n;
    (0..n).fold(RMatrix::zeros(dim, dim), |acc, q| acc - pauli_x(n, q))
}

/// Cost operator `Σ a σ_z...σ_z` built from Pauli strings.
pub fn spin_operator(h: &crate::ising::SpinHamiltonian) -> RMatrix {
    let dim = 1 << h.n();
    h.terms()
        .iter()
        .fold(RMatrix::zeros(dim, dim), |acc, (idx, &a)| acc + z_string(h.n(), idx) * a)
}

pub fn diagonal_operator(energies: &[f64]) -> RMatrix {
    RMatrix::from_diagonal(&DVector::from_column_slice(energies))
}

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(Complex64::from)
}

/// `exp(-i t H)` for real symmetric `H` via its eigendecomposition.
pub fn expm_hermitian(h: &RMatrix, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = complexify(&eig.eigenvectors);
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l));
    &v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// `exp(-iθ/2 P) = cos(θ/2) I - i sin(θ/2) P` for an involution `P`.
pub fn exp_involution(p: &RMatrix, theta: f64) -> CMatrix {
    let dim = p.nrows();
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    CMatrix::identity(dim, dim) * Complex64::from(c) - complexify(p) * Complex64::new(0.0, s)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `<ψ|H|ψ>` for real symmetric `H`.
pub fn expectation(state: &StateVector, h: &RMatrix) -> f64 {
    let psi = DVector::from_column_slice(state.amplitudes());
    let hp = complexify(h) * &psi;
    psi.dotc(&hp).re
}
