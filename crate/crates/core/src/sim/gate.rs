use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense `2^k x 2^k` unitary on `k` local qubits, local qubit 0 being the
/// least-significant bit of the row/column index.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    m: DMatrix<Complex64>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl GateMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a gate shape",
                m.nrows(),
                m.ncols()
            )));
        }
        let g = Self {
            arity: dim.trailing_zeros() as usize,
            m,
        };
        if !g.is_unitary(1e-12) {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(g)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.m.adjoint() * &self.m;
        let id = DMatrix::<Complex64>::identity(prod.nrows(), prod.ncols());
        (prod - id).iter().all(|v| v.norm() <= tol)
    }

    fn from_fn(arity: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let dim = 1 << arity;
        Self {
            arity,
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn rx(theta: f64) -> Self {
        let c = Complex64::from((theta / 2.0).cos());
        let s = -I * (theta / 2.0).sin();
        Self::from_fn(1, |r, col| if r == col { c } else { s })
    }

    pub fn rz(theta: f64) -> Self {
        Self::diagonal(1, |z| Complex64::from_polar(1.0, if z == 0 { -theta / 2.0 } else { theta / 2.0 }))
    }

    pub fn pauli_x() -> Self {
        Self::from_fn(1, |r, c| Complex64::from(if r != c { 1.0 } else { 0.0 }))
    }

    /// CNOT with local qubit `control` and the other as target.
    pub fn cnot(control: usize) -> Self {
        let target = 1 - control;
        Self::from_fn(2, |r, c| {
            let image = if (c >> control) & 1 == 1 { c ^ (1 << target) } else { c };
            Complex64::from(if r == image { 1.0 } else { 0.0 })
        })
    }

    /// `diag(e^{-iθ/2}, e^{iθ/2}, e^{iθ/2}, e^{-iθ/2})`.
    pub fn rzz(theta: f64) -> Self {
        Self::rzk(2, theta)
    }

    /// `exp(-iθ/2 Z^{⊗k})`.
    pub fn rzk(k: usize, theta: f64) -> Self {
        Self::diagonal(k, |z| {
            let sign = if z.count_ones() % 2 == 0 { -1.0 } else { 1.0 };
            Complex64::from_polar(1.0, sign * theta / 2.0)
        })
    }

    fn diagonal(arity: usize, f: impl Fn(usize) -> Complex64) -> Self {
        Self::from_fn(arity, |r, c| if r == c { f(r) } else { Complex64::from(0.0) })
    }

    /// Same operator with the two local qubits exchanged.
    pub fn swapped(&self) -> Result<Self> {
        if self.arity != 2 {
            return Err(Error::InvalidArgument("swap needs a two-qubit gate".into()));
        }
        let sw = |z: usize| ((z & 1) << 1) | (z >> 1);
        Ok(Self::from_fn(2, |r, c| self.m[(sw(r), sw(c))]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
