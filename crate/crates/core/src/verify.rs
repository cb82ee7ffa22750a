//! Property suites behind `qaoaforge verify`.
//!
//! Each suite runs a handful of randomized checks at desk scale and reports
//! one line per property. The random instance generators are public so tests
//! can reuse them.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ising::SpinHamiltonian;
use crate::model::{BinaryObjective, BruteForce, PuboProblem, QuboProblem};
use crate::qaoa::{build_circuit, CircuitOptions, Execution, QaoaCircuitSpec, QaoaParams};
use crate::sim::dense::{exp_involution, expm_hermitian, kernel_unitary, max_abs_diff, z_string};
use crate::sim::{trotter_error, GateMatrix, DEFAULT_REFERENCE_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gates,
    Symmetry,
    Trotter,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Gates, Suite::Symmetry, Suite::Trotter, Suite::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gates => "gates",
            Suite::Symmetry => "symmetry",
            Suite::Trotter => "trotter",
            Suite::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value and the threshold it was held to.
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, worst: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: worst <= tol,
            detail: format!("worst {worst:.3e} (limit {tol:.0e})"),
        }
    }

    fn boolean(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<44} {}", self.name, self.detail)
    }
}

/// Random symmetric-by-construction QUBO with entries in `[-1, 1)`.
pub fn random_qubo(rng: &mut impl Rng, n: usize) -> QuboProblem {
    let q: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    QuboProblem::new(&q, &c).expect("valid random QUBO")
}

/// Random PUBO with up to `2n` monomials of degree `1..=d`; indices may repeat.
pub fn random_pubo(rng: &mut impl Rng, n: usize, d: usize) -> PuboProblem {
    let count = rng.random_range(1..=2 * n);
    let terms: Vec<(Vec<usize>, f64)> = (0..count)
        .map(|_| {
            let k = rng.random_range(1..=d);
            let key = (0..k).map(|_| rng.random_range(0..n)).collect();
            (key, rng.random_range(-1.0..1.0))
        })
        .collect();
    let offset = rng.random_range(-1.0..1.0);
    PuboProblem::new(n, terms)
        .and_then(|p| p.with_offset(offset))
        .expect("valid random PUBO")
}

/// Random spin Hamiltonian on `n` qubits with terms of degree `1..=d`;
/// `even_only` restricts to even degrees (`d >= 2`). Never empty.
pub fn random_spin(rng: &mut impl Rng, n: usize, d: usize, even_only: bool) -> SpinHamiltonian {
    let d = d.min(n);
    loop {
        let count = rng.random_range(1..=2 * n);
        let mut terms = Vec::new();
        for _ in 0..count {
            let mut k = rng.random_range(1..=d);
            if even_only {
                k = (k / 2).max(1) * 2;
            }
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                idx.swap(i, j);
            }
            idx.truncate(k);
            terms.push((idx, rng.random_range(-1.0..1.0)));
        }
        let h = SpinHamiltonian::new(n, terms, 0.0).expect("valid random Hamiltonian");
        if h.scaling_factor().is_ok() {
            return h;
        }
    }
}

/// Random angles in `[-π, π)`.
pub fn random_params(rng: &mut impl Rng, p: usize) -> QaoaParams {
    let beta = (0..p).map(|_| rng.random_range(-PI..PI)).collect();
    let gamma = (0..p).map(|_| rng.random_range(-PI..PI)).collect();
    QaoaParams::new(beta, gamma).expect("finite draws")
}

pub fn circuit(h: &SpinHamiltonian) -> QaoaCircuitSpec {
    build_circuit(h, CircuitOptions::default()).expect("nonzero Hamiltonian")
}

/// Worst deviation of `R_ZZ` from its diagonal form and from its qubit swap.
pub fn rzz_deviation(theta: f64) -> Result<f64> {
    let kernel = kernel_unitary(2, |s| s.apply_rzz(0, 1, theta))?;
    let swapped = kernel_unitary(2, |s| s.apply_rzz(1, 0, theta))?;
    let ladder = kernel_unitary(2, |s| s.apply_rzz_decomposed(0, 1, theta))?;
    let ladder_swapped = kernel_unitary(2, |s| s.apply_rzz_decomposed(1, 0, theta))?;
    let diag = GateMatrix::rzz(theta);
    let dense_swap = diag.swapped()?;
    Ok([
        max_abs_diff(&kernel, diag.matrix()),
        max_abs_diff(&ladder, diag.matrix()),
        max_abs_diff(&ladder_swapped, diag.matrix()),
        max_abs_diff(&swapped, diag.matrix()),
        max_abs_diff(dense_swap.matrix(), diag.matrix()),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Deviation of the CNOT-ladder `R_{Z^k}` on qubits `0..k` from the dense
/// exponential of `Z^{⊗k}`.
pub fn rzk_ladder_deviation(k: usize, theta: f64) -> Result<f64> {
    let qubits: Vec<usize> = (0..k).collect();
    let ladder = kernel_unitary(k, |s| s.apply_rzk_ladder(&qubits, theta))?;
    let direct = kernel_unitary(k, |s| s.apply_rzk(&qubits, theta))?;
    let z = z_string(k, &qubits);
    let dense = expm_hermitian(&z, theta / 2.0);
    let closed = exp_involution(&z, theta);
    Ok(max_abs_diff(&ladder, &dense)
        .max(max_abs_diff(&direct, &dense))
        .max(max_abs_diff(&closed, &dense)))
}

/// `|E(-β, -γ) - E(β, γ)|`.
pub fn symmetry_deviation(spec: &QaoaCircuitSpec, params: &QaoaParams) -> Result<f64> {
    Ok((spec.energy(&params.negated())? - spec.energy(params)?).abs())
}

/// Largest `|E(.., β_i + π, ..) - E(β, γ)|` over `i`.
pub fn beta_shift_deviation(spec: &QaoaCircuitSpec, params: &QaoaParams) -> Result<f64> {
    let base = spec.energy(params)?;
    let mut worst = 0.0f64;
    for i in 0..params.p() {
        let mut shifted = params.clone();
        shifted.beta[i] += PI;
        worst = worst.max((spec.energy(&shifted)? - base).abs());
    }
    Ok(worst)
}

/// `1 - |<fast|gates>|` for the two `U_f` implementations.
pub fn fast_path_defect(spec: &QaoaCircuitSpec, params: &QaoaParams) -> Result<f64> {
    let fast = spec.with_execution(Execution::FastDiagonal).run(params)?;
    let gates = spec.with_execution(Execution::GateDecomposed).run(params)?;
    Ok(1.0 - fast.overlap(&gates)?)
}

/// Worst `|spin energy + constant - binary cost|` over all assignments.
/// Spins follow `s = 2x - 1`, so basis index `NOT x` carries assignment `x`.
pub fn round_trip_error(problem: &dyn BinaryObjective, h: &SpinHamiltonian) -> f64 {
    let n = problem.num_vars();
    let mask = (1u64 << n) - 1;
    (0..1u64 << n)
        .map(|x| (h.energy_of_index(!x & mask) + h.constant() - problem.cost_of_index(x)).abs())
        .fold(0.0, f64::max)
}

fn gates_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut rzz = 0.0f64;
    for _ in 0..20 {
        rzz = rzz.max(rzz_deviation(rng.random_range(-2.0 * PI..2.0 * PI))?);
    }
    let mut ladder = 0.0f64;
    for k in 1..=5 {
        for _ in 0..4 {
            ladder = ladder.max(rzk_ladder_deviation(k, rng.random_range(-2.0 * PI..2.0 * PI))?);
        }
    }
    let mut inverse = 0.0f64;
    for _ in 0..10 {
        let h = random_spin(rng, 4, 4, false);
        let spec = circuit(&h).with_execution(Execution::GateDecomposed);
        let params = random_params(rng, 2);
        let state = spec.run(&params)?;
        let mut back = state.clone();
        for l in (0..params.p()).rev() {
            for q in 0..4 {
                back.apply_rx(q, -params.beta[l])?;
            }
            for (idx, a) in spec.hamiltonian().terms() {
                back.apply_rzk_ladder(idx, -params.gamma[l] * a)?;
            }
        }
        let plus = crate::sim::StateVector::plus(4)?;
        inverse = inverse.max(1.0 - back.overlap(&plus)?);
    }
    Ok(vec![
        Check::at_most("R_ZZ diagonal form and qubit-swap invariance", rzz, 1e-12),
        Check::at_most("R_Z^k CNOT ladder vs dense exponential (k<=5)", ladder, 1e-12),
        Check::at_most("circuit inverted by negated angles", inverse, 1e-12),
    ])
}

fn symmetry_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut sym = 0.0f64;
    let mut period = 0.0f64;
    let mut odd_found = 0;
    let odd_total = 10;
    for i in 0..10 {
        let h = if i % 2 == 0 {
            SpinHamiltonian::from_qubo(&random_qubo(rng, 4))
        } else {
            SpinHamiltonian::from_pubo(&random_pubo(rng, 4, 4))
        };
        if h.scaling_factor().is_err() {
            continue;
        }
        let spec = circuit(&h);
        for p in 1..=3 {
            sym = sym.max(symmetry_deviation(&spec, &random_params(rng, p))?);
        }
    }
    for _ in 0..10 {
        let spec = circuit(&random_spin(rng, 4, 4, true));
        for p in 1..=3 {
            period = period.max(beta_shift_deviation(&spec, &random_params(rng, p))?);
        }
    }
    for _ in 0..odd_total {
        let mut h = random_spin(rng, 4, 4, false);
        while !h.has_odd_degree_term() {
            h = random_spin(rng, 4, 4, false);
        }
        let spec = circuit(&h);
        let mut found = false;
        for _ in 0..100 {
            if beta_shift_deviation(&spec, &random_params(rng, 1))? > 1e-3 {
                found = true;
                break;
            }
        }
        odd_found += usize::from(found);
    }
    Ok(vec![
        Check::at_most("E(-b,-g) = E(b,g) on random QUBO/PUBO", sym, 1e-10),
        Check::at_most("E periodic in each beta_i (even degrees)", period, 1e-10),
        Check::boolean(
            "odd-degree term breaks beta periodicity",
            odd_found * 10 >= odd_total * 9,
            format!("{odd_found}/{odd_total} instances with a violation > 1e-3"),
        ),
    ])
}

fn trotter_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let h = SpinHamiltonian::from_qubo(&random_qubo(rng, 3));
    let ps = [4, 8, 16, 32];
    let errs: Vec<f64> = ps
        .iter()
        .map(|&p| trotter_error(&h, p, DEFAULT_REFERENCE_STEPS))
        .collect::<Result<_>>()?;
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let ratio = errs[2] / errs[3];
    Ok(vec![
        Check::boolean(
            "Trotter error decreases with p",
            decreasing,
            format!("errors {:?}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()),
        ),
        Check::boolean(
            "error(16)/error(32) in [1.5, 2.5]",
            (1.5..=2.5).contains(&ratio),
            format!("ratio {ratio:.3}"),
        ),
    ])
}

fn oracle_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut qubo_err = 0.0f64;
    let mut pubo_err = 0.0f64;
    let mut paths = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let q = random_qubo(rng, n);
        qubo_err = qubo_err.max(round_trip_error(&q, &SpinHamiltonian::from_qubo(&q)));
        let p = random_pubo(rng, n, 4);
        let a = SpinHamiltonian::from_pubo(&p);
        let b = SpinHamiltonian::from_pubo_closed_form(&p)?;
        pubo_err = pubo_err.max(round_trip_error(&p, &a)).max(round_trip_error(&p, &b));
        let da = a.diagonalize()?;
        let db = b.diagonalize()?;
        paths = paths.max(da.iter().zip(&db).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    let mut brute_gap = 0.0f64;
    let mut fast = 0.0f64;
    for _ in 0..10 {
        let q = random_qubo(rng, 5);
        let h = SpinHamiltonian::from_qubo(&q);
        let best = BruteForce::default().solve(&q)?.best_cost;
        let diag_min = h.diagonalize()?.into_iter().fold(f64::INFINITY, f64::min) + h.constant();
        brute_gap = brute_gap.max((best - diag_min).abs());
        fast = fast.max(fast_path_defect(&circuit(&h), &random_params(rng, 3))?);
    }
    Ok(vec![
        Check::at_most("QUBO spin round trip", qubo_err, 1e-9),
        Check::at_most("PUBO spin round trip (both paths)", pubo_err, 1e-9),
        Check::at_most("PUBO expansion vs closed form", paths, 1e-9),
        Check::at_most("brute force vs diagonal minimum", brute_gap, 1e-9),
        Check::at_most("fast diagonal vs gate-decomposed U_f", fast, 1e-10),
    ])
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Gates => gates_suite(&mut rng),
        Suite::Symmetry => symmetry_suite(&mut rng),
        Suite::Trotter => trotter_suite(&mut rng),
        Suite::Oracle => oracle_suite(&mut rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for suite in Suite::ALL {
            for check in run_suite(suite, 7).unwrap() {
                assert!(check.passed, "{}: {check}", suite.name());
            }
        }
    }

    #[test]
    fn even_generator_respects_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(random_spin(&mut rng, 5, 4, true).all_even_degrees());
        }
    }
}
