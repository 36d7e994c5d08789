use super::*;
use crate::catalog;
use crate::fleet::{block_diagonal_model, random_model, random_unitary, triangular_model};
use crate::gksl::superoperator;
use crate::matkit::{best_scalar_fit, c, frobenius, pauli, I, ONE, ZERO};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn opts() -> IrreducibilityOptions {
    IrreducibilityOptions::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn noise_only(ls: Vec<CMat>) -> LindbladModel {
    let d = ls[0].nrows();
    LindbladModel::new(CMat::zeros(d, d), ls).unwrap()
}

/// Rank of all words of length ≤ `len` in `ops` applied to `xi`,
/// enumerated directly.
fn word_rank(ops: &[CMat], xi: &CVec, len: usize) -> usize {
    let ops: Vec<CMat> = ops
        .iter()
        .filter(|a| frobenius(a) > 1e-300)
        .map(|a| a.unscale(frobenius(a)))
        .collect();
    let mut layer = vec![xi.clone()];
    let mut all = vec![xi.clone()];
    for _ in 0..len {
        let mut next = Vec::new();
        for v in &layer {
            for a in &ops {
                next.push(a * v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    numeric_rank(&CMat::from_columns(&all), &Tolerance::with_rel(1e-9)).unwrap()
}

#[test]
fn delta_powers_of_zero_drift_repeat_l() {
    let l = pauli()[0].clone();
    let p = delta_powers(&CMat::zeros(2, 2), &l, 3).unwrap();
    assert_eq!(p.len(), 4);
    assert!(p[0] == l);
    assert!(p[1..].iter().all(|x| x.iter().all(|z| *z == ZERO)));
}

#[test]
fn pauli_example_commutators_are_proportional_to_paulis() {
    let model = catalog::pauli_model();
    let [s1, _, s3] = pauli();
    let l = &model.ls()[0];
    let d1 = &delta_powers(&drift(&model), l, 1).unwrap()[1];
    let (z1, r1) = best_scalar_fit(d1, &s1);
    assert!(r1 <= 1e-10 && z1.norm() > 0.5);
    let (z3, r3) = best_scalar_fit(&(d1 * l), &s3);
    assert!(r3 <= 1e-10 && z3.norm() > 0.5);
}

#[test]
fn rotation_example_bracket_is_displayed_matrix() {
    let model = catalog::so3();
    let gt = stratonovich_drift(&model);
    let d1 = &delta_powers(&gt, &model.ls()[0], 1).unwrap()[1];
    let want = CMat::from_row_slice(3, 3, &[ZERO, ZERO, ZERO, ZERO, ZERO, -ONE, ZERO, ONE, ZERO]);
    assert!(frobenius(&(d1 - want)) <= 1e-12);
    // G̃ = −iH and [G̃, L] = [G, L].
    assert!(frobenius(&(&gt - model.h() * (-I))) <= 1e-12);
    let d1g = &delta_powers(&drift(&model), &model.ls()[0], 1).unwrap()[1];
    assert!(frobenius(&(d1g - d1)) <= 1e-12);
}

#[test]
fn s_xi_of_pauli_is_full() {
    let model = catalog::pauli_model();
    let mut r = rng(10);
    for _ in 0..10 {
        let xi = random_unit_vector(&mut r, 2);
        assert_eq!(s_xi_span(&model, &xi, &tol()).unwrap().dim, 2);
    }
}

#[test]
fn s_xi_without_noise_is_the_line() {
    let model = catalog::pure_hamiltonian();
    let xi = CVec::from_vec(vec![c(0.3, 0.1), c(-1.0, 2.0)]);
    let s = s_xi_span(&model, &xi, &tol()).unwrap();
    assert_eq!(s.dim, 1);
    assert!((s.xi.norm() - 1.0).abs() < 1e-15);
    assert_eq!(s_xi_span(&model, &CVec::zeros(2), &tol()).unwrap_err(), Error::ZeroVector);
}

#[test]
fn s_xi_matches_word_enumeration() {
    let model = catalog::so3();
    let g = drift(&model);
    let deltas = delta_powers(&g, &model.ls()[0], 8).unwrap();
    let e1 = basis_vector(3, 0);
    assert_eq!(word_rank(&deltas, &e1, 6), 3);
    assert_eq!(s_xi_span(&model, &e1, &tol()).unwrap().dim, 3);
    let mut r = rng(11);
    for _ in 0..10 {
        let model = random_model(&mut r, 3, 1);
        let (block, _) = block_diagonal_model(&mut r, 3, 1, 1);
        for m in [model, block] {
            let xi = probe_vectors(&m, 0, 0)[3].clone();
            let deltas = delta_powers(&drift(&m), &m.ls()[0], 8).unwrap();
            assert_eq!(s_xi_span(&m, &xi, &tol()).unwrap().dim, word_rank(&deltas, &xi, 6), "{xi}");
        }
    }
}

#[test]
fn rotation_example_is_irreducible_by_both_algebra_routes() {
    let model = catalog::so3();
    let both = algebra_consensus(&model, &opts()).unwrap();
    assert!(both.irreducible());
    assert_eq!(both.gl.closure_dim, Some(9));
    assert_eq!(both.delta.closure_dim, Some(9));
}

#[test]
fn pure_hamiltonian_witness_is_an_eigenline() {
    let model = catalog::pure_hamiltonian();
    for method in [IrreducibilityMethod::AlgebraGL, IrreducibilityMethod::AlgebraDelta] {
        let v = is_irreducible(&model, method, &opts()).unwrap();
        assert!(!v.irreducible);
        let w = v.witness.expect("witness");
        assert_eq!(w.dim(), 1);
        let x = &w.vectors()[0];
        let hx = CMat::from_column_slice(2, 1, (model.h() * x).as_slice());
        let (_, r) = best_scalar_fit(&hx, &CMat::from_column_slice(2, 1, x.as_slice()));
        assert!(r < 1e-10);
    }
}

#[test]
fn block_models_yield_verified_witnesses() {
    let mut r = rng(12);
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2), (4, 1)] {
        for build in [block_diagonal_model, triangular_model] {
            let (model, u) = build(&mut r, d, 2, k);
            let v = is_irreducible(&model, IrreducibilityMethod::AlgebraGL, &opts()).unwrap();
            assert!(!v.irreducible);
            let w = v.witness.expect("witness");
            assert!(w.dim() > 0 && w.dim() < d);
            assert!(w.residual < 1e-8, "residual {}", w.residual);
            let _ = u;
        }
    }
}

#[test]
fn monte_carlo_route_on_examples() {
    let small = IrreducibilityOptions {
        mc_random_probes: 1,
        mc_config: TrajectoryConfig::new(1.0, 100, 2000, 3).unwrap(),
        ..opts()
    };
    let v = is_irreducible(&catalog::so3(), IrreducibilityMethod::MonteCarloTotality, &opts()).unwrap();
    assert!(v.irreducible, "{:?}", v.totality);
    let v = is_irreducible(&catalog::pure_hamiltonian(), IrreducibilityMethod::MonteCarloTotality, &small)
        .unwrap();
    assert!(!v.irreducible);
}

#[test]
fn small_equivalence_sweep() {
    let mut r = rng(13);
    for i in 0..24 {
        let d = 2 + i % 3;
        let m = 1 + i % 2;
        let model = match i % 4 {
            0 => block_diagonal_model(&mut r, d, m, 1).0,
            1 => triangular_model(&mut r, d, m, d - 1).0,
            _ => random_model(&mut r, d, m),
        };
        let both = algebra_consensus(&model, &opts()).unwrap();
        let probes = probe_vectors(&model, 20, i as u64);
        let sweep = sxi_sweep(&model, &probes, &tol()).unwrap();
        assert_eq!(both.irreducible(), sweep.all_full, "case {i}");
        assert_eq!(both.irreducible(), i % 4 >= 2, "case {i}");
    }
}

#[test]
fn support_rank_cases() {
    let so3 = catalog::so3();
    let s = support_projection(&so3, &basis_vector(3, 1), 1.0, &tol()).unwrap();
    assert_eq!((s.rank, s.state_rank), (3, 3));
    assert!(frobenius(&(s.projection - identity(3))) < 1e-10);
    let ph = catalog::pure_hamiltonian();
    let s = support_projection(&ph, &basis_vector(2, 0), 1.0, &tol()).unwrap();
    assert_eq!((s.rank, s.state_rank), (1, 1));
    assert!(matches!(
        support_projection(&ph, &basis_vector(2, 0), 0.0, &tol()),
        Err(Error::InvalidTime(_))
    ));
    // ξ inside the invariant plane of a triangular model.
    let mut r = rng(14);
    let (model, u) = triangular_model(&mut r, 3, 1, 2);
    let xi = u.column(0) * c(0.6, 0.0) + u.column(1) * c(0.0, 0.8);
    let s = support_projection(&model, &xi, 1.0, &tol()).unwrap();
    assert_eq!(s.rank, 2);
    assert!(s.agree);
}

#[test]
fn invariant_state_cases() {
    let rep = invariant_states(&catalog::so3(), &tol()).unwrap();
    assert!(rep.unique && rep.faithful);
    assert!(rep.residual < 1e-10);
    let rep = invariant_states(&catalog::pure_hamiltonian(), &tol()).unwrap();
    assert_eq!(rep.kernel_dim, 2);
    assert!(!rep.unique);
    let [s1, s2, s3] = pauli();
    let depol = noise_only(vec![s1, s2, s3]);
    let rep = invariant_states(&depol, &tol()).unwrap();
    assert!(rep.unique);
    let rho = rep.state.unwrap();
    assert!(frobenius(&(rho.rho() - identity(2) * c(0.5, 0.0))) < 1e-12);
    let applied = superoperator(&depol, Mode::Schrodinger)
        .apply(&(identity(2) * c(0.5, 0.0)))
        .unwrap();
    assert!(frobenius(&applied) < 1e-14);
}

#[test]
fn fixed_point_cases() {
    assert!(fixed_points(&catalog::so3(), &tol()).unwrap().trivial);
    assert_eq!(fixed_points(&catalog::pure_hamiltonian(), &tol()).unwrap().dim, 2);
    let zero = LindbladModel::hamiltonian(CMat::zeros(3, 3)).unwrap();
    assert_eq!(fixed_points(&zero, &tol()).unwrap().dim, 9);
}

#[test]
fn decoherence_free_cases() {
    let [s1, _, s3] = pauli();
    assert!(decoherence_free_trivial(&catalog::so3(), &tol()).unwrap());
    assert!(!decoherence_free_trivial(&noise_only(vec![s3.clone()]), &tol()).unwrap());
    assert!(decoherence_free_trivial(&noise_only(vec![s1, s3]), &tol()).unwrap());
    let mut damp = CMat::zeros(2, 2);
    damp[(0, 1)] = ONE;
    assert!(matches!(
        decoherence_free_trivial(&noise_only(vec![damp]), &tol()),
        Err(Error::NotApplicable(_))
    ));
}

#[test]
fn larc_manifold_cases() {
    let so3 = catalog::so3();
    assert_eq!(larc_algebra(&so3, true, &tol()).unwrap().len(), 3);
    for k in 0..3 {
        let mf = larc_manifold(&so3, &basis_vector(3, k), &tol()).unwrap();
        assert_eq!((mf.real_dim(), mf.complex_dim()), (2, 2));
        assert!(mf.complex.relative_residual(&basis_vector(3, k)) > 1.0 - 1e-12);
    }
    let ph = catalog::pure_hamiltonian();
    let mut r = rng(15);
    for _ in 0..5 {
        let mf = larc_manifold(&ph, &random_unit_vector(&mut r, 2), &tol()).unwrap();
        assert!(mf.complex_dim() <= 1);
    }
    let id_noise = noise_only(vec![identity(2)]);
    // G̃ = −½ − ½ = −1 here, so the algebra is R·1.
    let mf = larc_manifold(&id_noise, &basis_vector(2, 1), &tol()).unwrap();
    assert_eq!(mf.complex_dim(), 1);
}

#[test]
fn larc_verdicts_on_examples() {
    let o = LarcOptions::default();
    let rep = larc_check(&catalog::so3(), &o, &tol()).unwrap();
    assert_eq!(rep.verdict, LarcVerdict::FailsAt(basis_vector(3, 0).iter().copied().collect()));
    assert_eq!(rep.lie_dim, 3);
    let rep = larc_check(&catalog::pure_hamiltonian(), &o, &tol()).unwrap();
    assert!(matches!(rep.verdict, LarcVerdict::FailsAt(_)));
    assert!(rep.per_xi.iter().all(|p| p.complex_dim <= 1));
    let rep = larc_check(&catalog::generic_cycle_3(), &o, &tol()).unwrap();
    assert_eq!(rep.verdict, LarcVerdict::Holds);
    assert!(rep.caveat.is_some() && rep.burnside_full);
}

#[test]
fn sampled_larc_implies_irreducible() {
    let mut r = rng(16);
    for i in 0..12 {
        let d = 2 + i % 3;
        let model = if i % 3 == 0 {
            block_diagonal_model(&mut r, d, 1, 1).0
        } else {
            random_model(&mut r, d, 1 + i % 2)
        };
        let o = LarcOptions {
            random_probes: 10,
            ..LarcOptions::default()
        };
        let rep = larc_check(&model, &o, &tol()).unwrap();
        if rep.verdict == LarcVerdict::Holds {
            assert!(algebra_consensus(&model, &opts()).unwrap().irreducible(), "case {i}");
        }
        if i % 3 == 0 {
            assert!(matches!(rep.verdict, LarcVerdict::FailsAt(_)), "case {i}");
        }
    }
}

#[test]
fn irreducible_models_have_trivial_structures() {
    let mut r = rng(17);
    for i in 0..10 {
        let model = random_model(&mut r, 2 + i % 3, 1 + i % 2);
        assert!(algebra_consensus(&model, &opts()).unwrap().irreducible());
        let st = invariant_states(&model, &tol()).unwrap();
        assert!(st.unique && st.faithful, "case {i}");
        assert!(fixed_points(&model, &tol()).unwrap().trivial);
        assert!(decoherence_free_trivial(&model, &tol()).unwrap());
    }
}

#[test]
fn verdict_is_representation_invariant() {
    let mut r = rng(18);
    for i in 0..10 {
        let d = 2 + i % 3;
        let model = if i % 2 == 0 {
            random_model(&mut r, d, 2)
        } else {
            triangular_model(&mut r, d, 2, 1).0
        };
        let base = algebra_consensus(&model, &opts()).unwrap().irreducible();
        // (a) L_1 ← L_1 + z·1 with the compensating Hamiltonian shift.
        let z = c(0.7, -0.4);
        let l0 = &model.ls()[0];
        let h1 = model.h() - (l0.adjoint() * z - l0 * z.conj()) / (I * 2.0);
        let mut ls = model.ls().to_vec();
        ls[0] = l0 + identity(d) * z;
        let shifted = LindbladModel::new(h1, ls).unwrap();
        let a = superoperator(&model, Mode::Heisenberg).matrix;
        let b = superoperator(&shifted, Mode::Heisenberg).matrix;
        assert!(frobenius(&(a - b)) < 1e-10);
        assert_eq!(algebra_consensus(&shifted, &opts()).unwrap().irreducible(), base);
        // (b) unitary remixing of the noise family.
        let w = random_unitary(&mut r, 2);
        let remixed: Vec<CMat> = (0..2)
            .map(|j| &model.ls()[0] * w[(j, 0)] + &model.ls()[1] * w[(j, 1)])
            .collect();
        let mixed = LindbladModel::new(model.h().clone(), remixed).unwrap();
        assert_eq!(algebra_consensus(&mixed, &opts()).unwrap().irreducible(), base);
    }
}
