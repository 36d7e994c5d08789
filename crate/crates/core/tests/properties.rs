//! Randomized invariants of the closure, exponential, structure and I/O layers.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qms_core::fleet::{block_diagonal_model, ginibre, random_model, random_unit_vector, random_unitary};
use qms_core::generic::{chain_irreducible, DiagonalHamiltonian, RateMatrix};
use qms_core::gksl::{drift, minimalize, superoperator, Mode};
use qms_core::io::{emit_model, emit_rates, parse_model, parse_rates};
use qms_core::matkit::{
    commutator, frobenius, invariant_closure, lie_closure, matrix_exp, operator_algebra_closure,
    unvectorize, vectorize, CMat, Tolerance,
};
use qms_core::structure::{
    commutant, is_irreducible, s_xi_span, IrreducibilityMethod, IrreducibilityOptions,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariant_closure_is_idempotent_and_monotone(seed in any::<u64>(), d in 2usize..5, k in 0usize..3) {
        let mut r = rng(seed);
        // Nilpotent-free but possibly reducible family: a block model's operators.
        let ops: Vec<CMat> = if k == 0 {
            vec![ginibre(&mut r, d, d)]
        } else {
            let (m, _) = block_diagonal_model(&mut r, d, k, 1);
            m.ls().to_vec()
        };
        let x = random_unit_vector(&mut r, d);
        let y = random_unit_vector(&mut r, d);
        let once = invariant_closure(std::slice::from_ref(&x), &ops, &tol()).unwrap();
        let twice = invariant_closure(once.vectors(), &ops, &tol()).unwrap();
        prop_assert_eq!(once.count(), twice.count());
        for v in once.vectors() {
            for a in &ops {
                prop_assert!(once.relative_residual(&(a * v)) < 1e-8);
            }
        }
        let bigger = invariant_closure(&[x, y], &ops, &tol()).unwrap();
        prop_assert!(bigger.count() >= once.count());
        prop_assert!(bigger.contains_span(&once));
    }

    #[test]
    fn full_algebra_iff_trivial_commutant(seed in any::<u64>(), d in 2usize..5, reducible in any::<bool>()) {
        let mut r = rng(seed);
        let model = if reducible {
            block_diagonal_model(&mut r, d, 1, 1).0
        } else {
            random_model(&mut r, d, 1)
        };
        let mut gens = vec![drift(&model)];
        gens.extend(model.ls().iter().cloned());
        let alg = operator_algebra_closure(&gens, true, &tol(), d).unwrap();
        let comm = commutant(&gens, d, &tol()).unwrap();
        prop_assert_eq!(alg.count() == d * d, comm.len() == 1);
        prop_assert_eq!(alg.count() == d * d, !reducible);
    }

    #[test]
    fn lie_closure_is_closed_under_brackets(seed in any::<u64>(), d in 2usize..4, n in 1usize..3) {
        let mut r = rng(seed);
        let gens: Vec<CMat> = (0..n).map(|_| ginibre(&mut r, d, d)).collect();
        let basis = lie_closure(&gens, &tol(), d).unwrap();
        let mats: Vec<CMat> = basis.vectors().iter().map(|v| unvectorize(v, d)).collect();
        for a in &mats {
            for b in &mats {
                let c = vectorize(&commutator(a, b));
                if c.norm() > 1e-12 {
                    prop_assert!(basis.relative_residual(&c) < 1e-7);
                }
            }
        }
    }

    #[test]
    fn matrix_exp_solves_the_linear_ode(seed in any::<u64>(), d in 1usize..5, t in -2.0f64..2.0, scale in 0.1f64..8.0) {
        let mut r = rng(seed);
        let a = ginibre(&mut r, d, d) * num_complex::Complex64::new(scale, 0.0);
        let h = 1e-5;
        let central = (matrix_exp(&a, t + h) - matrix_exp(&a, t - h)) / num_complex::Complex64::new(2.0 * h, 0.0);
        let exact = &a * matrix_exp(&a, t);
        prop_assert!(frobenius(&(central - &exact)) <= 1e-5 * frobenius(&exact).max(1.0));
        // Group law.
        let split = matrix_exp(&a, 0.3 * t) * matrix_exp(&a, 0.7 * t);
        prop_assert!(frobenius(&(split - matrix_exp(&a, t))) <= 1e-10 * frobenius(&matrix_exp(&a, t)).max(1.0));
    }

    #[test]
    fn model_json_round_trip_is_exact(seed in any::<u64>(), d in 1usize..5, m in 0usize..4) {
        let model = random_model(&mut rng(seed), d, m);
        prop_assert_eq!(parse_model(&emit_model(&model)).unwrap(), model);
    }

    #[test]
    fn rate_json_round_trip_is_exact(rates in prop::collection::vec(0.0f64..5.0, 16), energies in prop::collection::vec(-3.0f64..3.0, 4)) {
        let gamma = RateMatrix::new(rates.chunks(4).map(<[f64]>::to_vec).collect()).unwrap();
        let h = DiagonalHamiltonian::new(energies).unwrap();
        let (g2, h2) = parse_rates(&emit_rates(&gamma, &h)).unwrap();
        prop_assert_eq!(g2, gamma);
        prop_assert_eq!(h2, h);
    }

    #[test]
    fn minimalize_preserves_the_generator(seed in any::<u64>(), d in 2usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let mut model = random_model(&mut r, d, m);
        // Make the family dependent: repeat an operator shifted by a multiple of 1.
        let shifted = &model.ls()[0] + qms_core::matkit::identity(d) * num_complex::Complex64::new(0.4, -0.2);
        let mut ls = model.ls().to_vec();
        ls.push(shifted);
        model = qms_core::gksl::LindbladModel::new(model.h().clone(), ls).unwrap();
        let min = minimalize(&model, &tol()).unwrap();
        prop_assert!(min.m() <= m);
        let diff = superoperator(&min, Mode::Heisenberg).matrix - superoperator(&model, Mode::Heisenberg).matrix;
        prop_assert!(frobenius(&diff) <= 1e-9);
    }

    #[test]
    fn verdicts_are_unitarily_invariant(seed in any::<u64>(), d in 2usize..4, reducible in any::<bool>()) {
        let mut r = rng(seed);
        let model = if reducible {
            block_diagonal_model(&mut r, d, 2, 1).0
        } else {
            random_model(&mut r, d, 1)
        };
        let u = random_unitary(&mut r, d);
        let rotated = model.conjugated(&u).unwrap();
        let opts = IrreducibilityOptions::default();
        let a = is_irreducible(&model, IrreducibilityMethod::AlgebraGL, &opts).unwrap();
        let b = is_irreducible(&rotated, IrreducibilityMethod::AlgebraGL, &opts).unwrap();
        prop_assert_eq!(a.irreducible, b.irreducible);
        let xi = random_unit_vector(&mut r, d);
        let s1 = s_xi_span(&model, &xi, &tol()).unwrap().dim;
        let s2 = s_xi_span(&rotated, &(&u * &xi), &tol()).unwrap().dim;
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn chain_certificates_are_simple_positive_paths(rates in prop::collection::vec(prop_oneof![Just(0.0), 0.1f64..3.0], 25)) {
        let gamma = RateMatrix::new(rates.chunks(5).map(<[f64]>::to_vec).collect()).unwrap();
        let v = chain_irreducible(&gamma);
        if v.irreducible {
            prop_assert_eq!(v.paths.len(), 20);
            for p in &v.paths {
                prop_assert_eq!(p.path.first(), Some(&p.from));
                prop_assert_eq!(p.path.last(), Some(&p.to));
                let mut seen = p.path.clone();
                seen.sort_unstable();
                seen.dedup();
                prop_assert_eq!(seen.len(), p.path.len());
                prop_assert!(p.path.windows(2).all(|w| gamma.rate(w[0], w[1]) > 0.0));
            }
        } else {
            let (from, to) = v.unreachable.unwrap();
            prop_assert!(from != to);
        }
    }
}
