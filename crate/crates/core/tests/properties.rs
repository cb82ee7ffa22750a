use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qaoaforge::model::{bits_of, BinaryObjective};
use qaoaforge::optimize::{optimize, sigma_2pi, sigma_pi, squash_params, OptimizerConfig};
use qaoaforge::qaoa::{build_circuit, CircuitOptions, Execution};
use qaoaforge::verify::{
    beta_shift_deviation, circuit, fast_path_defect, random_params, random_pubo, random_qubo, random_spin,
    round_trip_error, symmetry_deviation,
};
use qaoaforge::{ConstraintKind, ConstraintSpec, PuboProblem, QuboProblem, SpinHamiltonian, StateVector};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn matrix(n: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (
        prop::collection::vec(prop::collection::vec(-5.0..5.0f64, n), n),
        prop::collection::vec(-5.0..5.0f64, n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qubo_symmetrization_preserves_cost((q, c) in (1usize..6).prop_flat_map(matrix), z in any::<u64>()) {
        let n = c.len();
        let problem = QuboProblem::new(&q, &c).unwrap();
        let x = bits_of(z & ((1 << n) - 1), n);
        let mut raw = 0.0;
        for i in 0..n {
            for j in 0..n {
                if x[i] && x[j] {
                    raw += q[i][j];
                }
            }
            if x[i] {
                raw += c[i];
            }
        }
        prop_assert!((problem.evaluate(&x).unwrap() - raw).abs() < 1e-9);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(problem.q(i, j), problem.q(j, i));
            }
        }
    }

    #[test]
    fn degree_two_pubo_matches_qubo(seed in any::<u64>(), n in 1usize..7) {
        let q = random_qubo(&mut rng(seed), n);
        let p = PuboProblem::from_qubo(&q);
        for z in 0..1u64 << n {
            prop_assert!((p.cost_of_index(z) - q.cost_of_index(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_divides_costs(seed in any::<u64>(), n in 1usize..6, k in 0.1..10.0f64) {
        let p = random_pubo(&mut rng(seed), n, 3);
        let s = p.scaled(k).unwrap();
        for z in 0..1u64 << n {
            prop_assert!((s.cost_of_index(z) * k - p.cost_of_index(z)).abs() < 1e-9);
        }
    }

    #[test]
    fn spin_hamiltonian_scaling_bounds_coefficients(seed in any::<u64>(), n in 1usize..7) {
        let h = random_spin(&mut rng(seed), n, 4, false);
        let k = h.scaling_factor().unwrap();
        let s = h.scaled(k).unwrap();
        let max = s.terms().values().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((max - 1.0).abs() < 1e-12);
        let (a, b) = (h.diagonalize().unwrap(), s.diagonalize().unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x / k - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_round_trip(seed in any::<u64>(), n in 1usize..8, d in 1usize..5) {
        let mut r = rng(seed);
        let q = random_qubo(&mut r, n);
        prop_assert!(round_trip_error(&q, &SpinHamiltonian::from_qubo(&q)) < 1e-9);
        let p = random_pubo(&mut r, n, d);
        prop_assert!(round_trip_error(&p, &SpinHamiltonian::from_pubo(&p)) < 1e-9);
    }

    #[test]
    fn expansion_matches_closed_form(seed in any::<u64>(), n in 1usize..7, d in 1usize..6) {
        let p = random_pubo(&mut rng(seed), n, d);
        let a = SpinHamiltonian::from_pubo(&p);
        let b = SpinHamiltonian::from_pubo_closed_form(&p).unwrap();
        prop_assert!((a.constant() - b.constant()).abs() < 1e-9);
        for (x, y) in a.diagonalize().unwrap().iter().zip(&b.diagonalize().unwrap()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn diagonal_consistent_with_evaluate(seed in any::<u64>(), n in 1usize..7) {
        let h = random_spin(&mut rng(seed), n, n, false);
        let diag = h.diagonalize().unwrap();
        for z in 0..1u64 << n {
            let s: Vec<i8> = (0..n).map(|q| if (z >> q) & 1 == 0 { 1 } else { -1 }).collect();
            prop_assert_eq!(diag[z as usize], h.energy_of_index(z));
            prop_assert!((h.evaluate(&s).unwrap() - diag[z as usize]).abs() < 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm_and_invert(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let start = StateVector::plus(n).unwrap();
        let mut s = start.clone();
        let mut ops = Vec::new();
        for _ in 0..20 {
            let q = r.random_range(0..n);
            let t = r.random_range(0..n);
            let theta = r.random_range(-PI..PI);
            let kind = r.random_range(0..4);
            match kind {
                0 => s.apply_rx(q, theta).unwrap(),
                1 => s.apply_rz(q, theta).unwrap(),
                2 if q != t => s.apply_rzz_decomposed(q, t, theta).unwrap(),
                _ if q != t => s.apply_cnot(q, t).unwrap(),
                _ => s.apply_rx(q, theta).unwrap(),
            }
            ops.push((kind, q, t, theta));
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
        for &(kind, q, t, theta) in ops.iter().rev() {
            match kind {
                0 => s.apply_rx(q, -theta).unwrap(),
                1 => s.apply_rz(q, -theta).unwrap(),
                2 if q != t => s.apply_rzz_decomposed(q, t, -theta).unwrap(),
                _ if q != t => s.apply_cnot(q, t).unwrap(),
                _ => s.apply_rx(q, -theta).unwrap(),
            }
        }
        prop_assert!(1.0 - s.overlap(&start).unwrap() < 1e-12);
    }

    #[test]
    fn fast_and_gate_paths_agree(seed in any::<u64>(), n in 1usize..6, p in 1usize..4) {
        let mut r = rng(seed);
        let h = random_spin(&mut r, n, n, false);
        prop_assert!(fast_path_defect(&circuit(&h), &random_params(&mut r, p)).unwrap() < 1e-10);
        let spec = build_circuit(&h, CircuitOptions { execution: Execution::GateDecomposed, ..Default::default() }).unwrap();
        prop_assert_eq!(spec.execution(), Execution::GateDecomposed);
    }

    #[test]
    fn energy_symmetries(seed in any::<u64>(), n in 2usize..6, p in 1usize..4) {
        let mut r = rng(seed);
        let h = random_spin(&mut r, n, n, false);
        let spec = circuit(&h);
        let params = random_params(&mut r, p);
        prop_assert!(symmetry_deviation(&spec, &params).unwrap() < 1e-10);
        let even = circuit(&random_spin(&mut r, n, n, true));
        prop_assert!(beta_shift_deviation(&even, &params).unwrap() < 1e-10);
    }

    #[test]
    fn squash_ranges_and_monotone(x in -30.0..30.0f64, dx in 1e-3..1.0f64) {
        let (a, b) = (sigma_pi(x), sigma_2pi(x));
        prop_assert!((0.0..=PI).contains(&a));
        prop_assert!((-PI..=PI).contains(&b));
        prop_assert!(sigma_pi(x + dx) >= a);
        prop_assert!(sigma_2pi(x + dx) >= b);
        let full = squash_params(&[x, x], true).unwrap();
        prop_assert!((0.0..=PI).contains(&full.gamma[0]));
    }

    #[test]
    fn exact_penalties_vanish_iff_satisfied(seed in any::<u64>(), n in 2usize..8) {
        use ConstraintKind::*;
        let mut r = rng(seed);
        let i = r.random_range(0..n);
        let j = (i + r.random_range(1..n)) % n;
        let k = r.random_range(1..=n);
        let set: Vec<usize> = (0..k).collect();
        let weights: Vec<f64> = (0..k).map(|_| r.random_range(0..=3) as f64).collect();
        let specs = [
            ConstraintSpec::new(AtMostOnePair, vec![i, j], 1.5),
            ConstraintSpec::new(AtLeastOnePair, vec![i, j], 1.5),
            ConstraintSpec::new(EqualPair, vec![i, j], 1.5),
            ConstraintSpec::new(AtMostOneSet, set.clone(), 1.5),
            ConstraintSpec::new(ExactSum, set.clone(), 1.5).with_bound(r.random_range(0..=k) as f64),
            ConstraintSpec::new(SlackInequality, set, 1.5).with_weights(weights).with_bound(r.random_range(0..=6) as f64),
        ];
        for spec in &specs {
            let pen = spec.apply_to_qubo(&QuboProblem::zeros(n).unwrap()).unwrap();
            let m = pen.slack_vars.len();
            for z in 0..1u64 << n {
                let x = bits_of(z, n);
                // Some slack setting reaches the minimum; none goes below zero.
                let values: Vec<f64> = (0..1u64 << m).map(|s| pen.problem.cost_of_index(z | s << n)).collect();
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                prop_assert!(min > -1e-9);
                prop_assert_eq!(min.abs() < 1e-9, spec.is_satisfied(&x), "{:?} at {:?}", spec.kind, x);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spsa_is_deterministic_and_reports_best(seed in any::<u64>()) {
        let h = random_spin(&mut rng(seed), 3, 2, false);
        let spec = circuit(&h);
        let config = OptimizerConfig { max_iters: 30, restarts: 3, seed, ..Default::default() };
        let a = optimize(&spec, 2, &config).unwrap();
        let b = optimize(&spec, 2, &config).unwrap();
        prop_assert_eq!(&a, &b);
        let min = a.restarts.iter().map(|r| r.final_energy).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(a.best_energy.scaled, min);
        for r in &a.restarts {
            prop_assert!(r.trace.len() <= 30);
            prop_assert!(r.final_energy <= r.initial_energy);
        }
    }
}
