mod common;

use common::{eigenvalues, rel_frobenius, thompson, to_na};
use gkemean::repfn::{rep_eval, DEFAULT_TOL};
use gkemean::solver::{quasi_arithmetic, solve_gke, GkeProblem, SolverConfig, WeightVector};
use gkemean::spd::{random_spd, thompson_distance};
use gkemean::{Generator, Matrix, SpdMatrix};
use proptest::prelude::*;

fn generator() -> impl Strategy<Value = Generator> {
    let n = Generator::catalogue().len();
    (0..n).prop_map(|i| Generator::catalogue()[i].clone())
}

fn spd(max_dim: usize, max_log_cond: f64) -> impl Strategy<Value = SpdMatrix> {
    (1..=max_dim, 0.0..max_log_cond, any::<u64>()).prop_map(|(d, l, s)| random_spd(d, l, s))
}

fn family(max_dim: usize) -> impl Strategy<Value = (WeightVector, Vec<SpdMatrix>)> {
    (1..=max_dim, 2..=4usize, any::<u64>(), prop::collection::vec(0.05..1.0f64, 4)).prop_map(
        |(d, n, seed, raw)| {
            let total: f64 = raw[..n].iter().sum();
            let w = WeightVector::normalized(raw[..n].iter().map(|x| x / total).collect(), 1e-9).unwrap();
            let mats = (0..n as u64).map(|k| random_spd(d, 2.0, seed.wrapping_add(k))).collect();
            (w, mats)
        },
    )
}

fn solve(g: &Generator, w: &WeightVector, mats: &[SpdMatrix]) -> SpdMatrix {
    let problem = GkeProblem::new(w.clone(), mats.to_vec(), g.clone()).unwrap();
    let config = SolverConfig {
        residual_tol: 1e-12,
        ..SolverConfig::default()
    };
    solve_gke(&problem, &config).unwrap().solution
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_matches_nalgebra(a in spd(8, 10.0)) {
        let ours = a.eigenvalues().unwrap();
        let theirs = eigenvalues(&to_na(a.matrix()));
        let scale = theirs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut ours = ours;
        ours.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn sqrt_squares_back(a in spd(6, 8.0)) {
        let r = a.sqrt().unwrap();
        let sq = r.matrix().matmul(r.matrix());
        prop_assert!(rel_frobenius(&to_na(&sq), &to_na(a.matrix())) < 1e-12);
    }

    #[test]
    fn thompson_agrees_with_oracle(a in spd(5, 4.0), seed in any::<u64>()) {
        let b = random_spd(a.dim(), 4.0, seed);
        let ours = thompson_distance(&a, &b).unwrap();
        prop_assert!((ours - thompson(&a, &b)).abs() < 1e-10 * ours.max(1.0));
    }

    #[test]
    fn matrix_json_round_trip_is_exact(a in spd(5, 12.0)) {
        let text = serde_json::to_string(&a).unwrap();
        let back: SpdMatrix = serde_json::from_str(&text).unwrap();
        let bits = |m: &Matrix| m.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(a.matrix()), bits(back.matrix()));
    }

    #[test]
    fn generator_inverse_round_trip(g in generator(), e in -3.0..3.0f64) {
        let x = 10f64.powf(e);
        let back = g.inverse(g.eval(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * x, "{g}: {x} -> {back}");
    }

    #[test]
    fn generator_spec_round_trip(g in generator(), p in 1.01..4.0f64, deform in any::<bool>()) {
        let g = if deform { g.deform(p).unwrap() } else { g };
        let back: Generator = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn rep_eval_is_a_mean(g in generator(), lambda in 0.01..0.99f64, e in -3.0..3.0f64) {
        let x = 10f64.powf(e);
        let y = rep_eval(&g, lambda, x, DEFAULT_TOL).unwrap();
        let slack = 1e-12 * x.max(1.0);
        prop_assert!(y >= x.min(1.0) - slack && y <= x.max(1.0) + slack, "{g}: f({x}) = {y}");
    }

    #[test]
    fn rep_eval_is_monotone(g in generator(), lambda in 0.01..0.99f64, e in -3.0..3.0f64, de in 0.01..1.0f64) {
        let (x, x2) = (10f64.powf(e), 10f64.powf(e + de));
        let y = rep_eval(&g, lambda, x, DEFAULT_TOL).unwrap();
        let y2 = rep_eval(&g, lambda, x2, DEFAULT_TOL).unwrap();
        prop_assert!(y2 >= y * (1.0 - 1e-12));
        let z = rep_eval(&g, (lambda + 0.005).min(0.999), x, DEFAULT_TOL).unwrap();
        if x > 1.0 {
            prop_assert!(z >= y * (1.0 - 1e-12));
        } else {
            prop_assert!(z <= y * (1.0 + 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mean_of_equal_matrices_is_that_matrix(g in generator(), a in spd(5, 3.0), n in 1..4usize) {
        let w = WeightVector::uniform(n).unwrap();
        let mats = vec![a.clone(); n];
        prop_assert!(thompson(&solve(&g, &w, &mats), &a) < 1e-9);
        prop_assert!(thompson(&quasi_arithmetic(&w, &mats, &g).unwrap(), &a) < 1e-9);
    }

    #[test]
    fn mean_is_congruence_covariant(g in generator(), (w, mats) in family(4), seed in any::<u64>()) {
        let m = random_spd(mats[0].dim(), 1.0, seed).into_matrix();
        let moved: Vec<SpdMatrix> = mats.iter().map(|a| a.congruence(&m).unwrap()).collect();
        let lhs = solve(&g, &w, &moved);
        let rhs = solve(&g, &w, &mats).congruence(&m).unwrap();
        prop_assert!(thompson(&lhs, &rhs) < 1e-8);
    }

    #[test]
    fn mean_is_permutation_invariant(g in generator(), (w, mats) in family(4)) {
        let mut rw = w.as_slice().to_vec();
        rw.reverse();
        let mut rm = mats.clone();
        rm.reverse();
        let lhs = solve(&g, &w, &mats);
        let rhs = solve(&g, &WeightVector::new(rw).unwrap(), &rm);
        prop_assert!(thompson(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn mean_lies_between_harmonic_and_arithmetic(g in generator(), (w, mats) in family(4)) {
        let x = to_na(solve(&g, &w, &mats).matrix());
        let lo = common::harmonic(w.as_slice(), &mats);
        let hi = common::arithmetic(w.as_slice(), &mats);
        prop_assert!(common::loewner_margin(&lo, &x) > -1e-9);
        prop_assert!(common::loewner_margin(&x, &hi) > -1e-9);
    }

    #[test]
    fn diagonal_family_solves_scalar_equations(g in generator(), seed in any::<u64>(), d in 1..5usize) {
        let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mats: Vec<SpdMatrix> = (0..3u64)
            .map(|k| {
                let values: Vec<f64> = random_spd(d, 2.0, seed.wrapping_add(k)).eigenvalues().unwrap();
                SpdMatrix::diag(&values).unwrap()
            })
            .collect();
        let x = solve(&g, &w, &mats);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    prop_assert!(x.matrix()[(i, j)].abs() < 1e-10);
                }
            }
            let xi = x.matrix()[(i, i)];
            let s: f64 = w.as_slice().iter().zip(&mats).map(|(wk, a)| wk * g.eval(a.matrix()[(i, i)] / xi)).sum();
            prop_assert!(s.abs() < 1e-9, "{g}: scalar residual {s}");
        }
    }
}

#[test]
fn fixed_point_scheme_converges_without_newton() {
    for (k, g) in [Generator::log(), Generator::power(0.5).unwrap(), Generator::moebius()].iter().enumerate() {
        for seed in 0..5u64 {
            let mats: Vec<SpdMatrix> = (0..3).map(|j| random_spd(3, 1.5, 97 * seed + j + 10 * k as u64)).collect();
            let problem = GkeProblem::new(WeightVector::uniform(3).unwrap(), mats, g.clone()).unwrap();
            let plain = SolverConfig {
                newton: false,
                closed_forms: false,
                max_iterations: 5000,
                ..SolverConfig::default()
            };
            let slow = solve_gke(&problem, &plain).unwrap();
            assert_eq!(slow.newton_steps, 0);
            assert!(slow.residual <= 1e-10);
            let fast = solve_gke(&problem, &SolverConfig::default()).unwrap();
            assert!(thompson(&slow.solution, &fast.solution) < 1e-8, "{g} seed {seed}");
        }
    }
}
