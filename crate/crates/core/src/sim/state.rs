use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::{GateMatrix, MAX_QUBITS};
use crate::error::{Error, Result};

/// Measurement counts keyed by basis index.
pub type Histogram = BTreeMap<u64, u64>;

/// Work below this many amplitudes stays on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<Complex64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::TooLarge {
            size: n,
            cap: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

impl StateVector {
    /// Computational basis state `|z>`.
    pub fn basis(n: usize, z: u64) -> Result<Self> {
        check_n(n)?;
        if z >> n != 0 {
            return Err(Error::IndexOutOfRange {
                index: z as usize,
                len: 1 << n,
            });
        }
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[z as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amp })
    }

    /// Uniform superposition `|+>^n`, the ground state of `-Σ σ_x`.
    pub fn plus(n: usize) -> Result<Self> {
        check_n(n)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        Ok(Self {
            n,
            amp: vec![Complex64::new(a, 0.0); 1 << n],
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1
    /// within `1e-10`.
    pub fn from_amplitudes(amp: Vec<Complex64>) -> Result<Self> {
        if !amp.len().is_power_of_two() || amp.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes is not a power of two",
                amp.len()
            )));
        }
        let n = amp.len().trailing_zeros() as usize;
        check_n(n)?;
        let s = Self { n, amp };
        let norm = s.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm^2 is {norm}")));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(Complex64::norm_sqr).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        self.inner(other).map(|c| c.norm())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: q,
                len: self.n,
            })
        }
    }

    fn check_energies(&self, energies: &[f64]) -> Result<()> {
        if energies.len() == self.amp.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{} energies for {} amplitudes",
                energies.len(),
                self.amp.len()
            )))
        }
    }

    /// Applies `f(a0, a1)` to every amplitude pair differing in bit `q`.
    fn for_pairs(&mut self, q: usize, f: impl Fn(&mut Complex64, &mut Complex64) + Sync) {
        let half = 1usize << q;
        let apply = |block: &mut [Complex64]| {
            let (lo, hi) = block.split_at_mut(half);
            for (a0, a1) in lo.iter_mut().zip(hi) {
                f(a0, a1);
            }
        };
        if self.amp.len() >= PAR_THRESHOLD {
            self.amp.par_chunks_mut(2 * half).for_each(apply);
        } else {
            self.amp.chunks_mut(2 * half).for_each(apply);
        }
    }

    /// Multiplies amplitude `z` by `f(z)`.
    fn for_each_phase(&mut self, f: impl Fn(u64) -> Complex64 + Sync) {
        if self.amp.len() >= PAR_THRESHOLD {
            self.amp
                .par_iter_mut()
                .enumerate()
                .for_each(|(z, a)| *a *= f(z as u64));
        } else {
            for (z, a) in self.amp.iter_mut().enumerate() {
                *a *= f(z as u64);
            }
        }
    }

    /// Arbitrary single-qubit gate.
    pub fn apply_1q(&mut self, q: usize, g: &GateMatrix) -> Result<()> {
        self.check_qubit(q)?;
        if g.arity() != 1 {
            return Err(Error::DimensionMismatch(format!("{}-qubit gate on one qubit", g.arity())));
        }
        let m = g.matrix();
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        self.for_pairs(q, |a0, a1| {
            let (x, y) = (*a0, *a1);
            *a0 = m00 * x + m01 * y;
            *a1 = m10 * x + m11 * y;
        });
        Ok(())
    }

    /// `R_x(θ) = cos(θ/2) I - i sin(θ/2) σ_x`.
    pub fn apply_rx(&mut self, q: usize, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        let mis = Complex64::new(0.0, -s);
        self.for_pairs(q, |a0, a1| {
            let (x, y) = (*a0, *a1);
            *a0 = x * c + y * mis;
            *a1 = x * mis + y * c;
        });
        Ok(())
    }

    /// `R_z(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
    pub fn apply_rz(&mut self, q: usize, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let p0 = Complex64::from_polar(1.0, -theta / 2.0);
        let p1 = p0.conj();
        self.for_pairs(q, |a0, a1| {
            *a0 *= p0;
            *a1 *= p1;
        });
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.for_pairs(q, std::mem::swap);
        Ok(())
    }

    /// Flips `target` on basis states whose `control` bit is 1.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidArgument("CNOT control equals target".into()));
        }
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for z in 0..self.amp.len() {
            if z & cbit != 0 && z & tbit == 0 {
                self.amp.swap(z, z | tbit);
            }
        }
        Ok(())
    }

    /// `exp(-iθ/2 σ_z^i σ_z^j)` as a parity phase.
    pub fn apply_rzz(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        if i == j {
            return Err(Error::InvalidArgument("R_ZZ on a single qubit".into()));
        }
        let mut qubits = [i, j];
        qubits.sort_unstable();
        self.apply_rzk(&qubits, theta)
    }

    /// `R_ZZ` as `CNOT(i, j) R_z^j(θ) CNOT(i, j)`.
    pub fn apply_rzz_decomposed(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        self.apply_cnot(i, j)?;
        self.apply_rz(j, theta)?;
        self.apply_cnot(i, j)
    }

    fn check_sorted(&self, qubits: &[usize]) -> Result<u64> {
        if qubits.is_empty() {
            return Err(Error::InvalidArgument("R_Z^k needs at least one qubit".into()));
        }
        if qubits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "qubits {qubits:?} must be strictly increasing"
            )));
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        Ok(qubits.iter().fold(0u64, |m, &q| m | 1 << q))
    }

    /// `exp(-iθ/2 σ_z^{i1} ... σ_z^{ik})`: phase `e^{∓iθ/2}` by the parity of
    /// the selected bits.
    pub fn apply_rzk(&mut self, qubits: &[usize], theta: f64) -> Result<()> {
        let mask = self.check_sorted(qubits)?;
        let even = Complex64::from_polar(1.0, -theta / 2.0);
        let odd = even.conj();
        self.for_each_phase(|z| if (z & mask).count_ones() % 2 == 0 { even } else { odd });
        Ok(())
    }

    /// `R_Z^k` as a CNOT ladder onto the last qubit around one `R_z`.
    pub fn apply_rzk_ladder(&mut self, qubits: &[usize], theta: f64) -> Result<()> {
        self.check_sorted(qubits)?;
        let (&last, rest) = qubits.split_last().expect("nonempty");
        for &c in rest {
            self.apply_cnot(c, last)?;
        }
        self.apply_rz(last, theta)?;
        for &c in rest.iter().rev() {
            self.apply_cnot(c, last)?;
        }
        Ok(())
    }

    /// `amp[z] *= exp(-i γ/2 E[z])`.
    pub fn apply_diagonal_phase(&mut self, energies: &[f64], gamma: f64) -> Result<()> {
        self.check_energies(energies)?;
        let h = -gamma / 2.0;
        self.for_each_phase(|z| Complex64::from_polar(1.0, h * energies[z as usize]));
        Ok(())
    }

    /// `Σ_z |amp[z]|^2 E[z]`.
    pub fn expectation_diagonal(&self, energies: &[f64]) -> Result<f64> {
        self.check_energies(energies)?;
        Ok(self
            .amp
            .iter()
            .zip(energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// Multinomial draw of `shots` measurements, deterministic in `seed`.
    ///
    /// Uses ChaCha8 seeded from the 64-bit seed. With fewer shots than basis
    /// states each shot is an inverse-CDF lookup; otherwise counts come from a
    /// chain of conditional binomials.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probs = self.probabilities();
        let total: f64 = probs.iter().sum();
        let mut hist = Histogram::new();
        if (shots as u128) < probs.len() as u128 {
            let mut cdf = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for p in &probs {
                acc += p;
                cdf.push(acc);
            }
            let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
            for _ in 0..shots {
                let u = rng.random::<f64>() * total;
                let z = cdf.partition_point(|&c| c <= u).min(last_nonzero);
                *hist.entry(z as u64).or_insert(0) += 1;
            }
        } else {
            let mut left = shots;
            let mut mass = total;
            for (z, &p) in probs.iter().enumerate() {
                if left == 0 {
                    break;
                }
                if p <= 0.0 {
                    continue;
                }
                let ratio = (p / mass).clamp(0.0, 1.0);
                let k = if ratio >= 1.0 {
                    left
                } else {
                    Binomial::new(left, ratio)
                        .map_err(|e| Error::InvalidArgument(e.to_string()))?
                        .sample(&mut rng)
                };
                if k > 0 {
                    hist.insert(z as u64, k);
                }
                left -= k;
                mass -= p;
            }
            if left > 0 {
                // Rounding left mass unassigned; give it to the last populated outcome.
                let z = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64;
                *hist.entry(z).or_insert(0) += left;
            }
        }
        Ok(hist)
    }
}
