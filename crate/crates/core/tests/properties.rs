use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use spin1_ks::accuracy::errors_heisenberg;
use spin1_ks::coloring::{brute_force_colorable, check_coloring, find_legal_coloring, ortho_structure, peres_rays, SolveOutcome};
use spin1_ks::context::{
    contextuality_experiment, hidden_illegal_probability, match_probability, rotation_matrix, AlignmentDistribution,
    ExperimentConfig, ValuationStrategy,
};
use spin1_ks::matrix::{exp_i, hermitian_eig, spectral_norm, tensor, ComplexMatrix, C64};
use spin1_ks::measure::{is_legal_combination, sequential_model, JointScheme, MeasurementModel};
use spin1_ks::spin1::{angular_momentum_ops, projection, squared_projection, triad_from_angles, Triad, UnitVector3};
use spin1_ks::{tolerance, Ket};

fn entry() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(entry(), n * n).prop_map(move |v| ComplexMatrix::from_vec(n, v))
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| m.hermitian_part())
}

fn unit() -> impl Strategy<Value = UnitVector3> {
    (-1.0..1.0f64, 0.0..TAU).prop_map(|(z, a)| {
        let s = (1.0 - z * z).sqrt();
        UnitVector3::normalize(s * a.cos(), s * a.sin(), z).unwrap()
    })
}

fn small_triad() -> impl Strategy<Value = Triad> {
    (-0.3..0.3f64, -0.3..0.3f64, 0.0..TAU).prop_map(|(p, t, f)| triad_from_angles(p, t, f))
}

fn any_triad() -> impl Strategy<Value = Triad> {
    (unit(), unit(), unit()).prop_map(|(a, b, c)| Triad::oriented(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(h in hermitian(4)) {
        let e = hermitian_eig(&h).unwrap();
        let back = e.map_spectrum(|x| C64::new(x, 0.0));
        prop_assert!(back.approx_eq(&h, 1e-10));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectral_norm_triangle(a in matrix(3), b in matrix(3)) {
        prop_assert!(spectral_norm(&(&a + &b)) <= spectral_norm(&a) + spectral_norm(&b) + 1e-12);
        prop_assert!(spectral_norm(&a) <= a.frobenius_norm() + 1e-12);
    }

    #[test]
    fn exp_i_is_unitary_with_inverse(h in hermitian(3)) {
        let u = exp_i(&h).unwrap();
        let v = exp_i(&-&h).unwrap();
        prop_assert!(u.is_unitary(1e-10));
        prop_assert!((&u * &v).approx_eq(&ComplexMatrix::identity(3), 1e-10));
    }

    #[test]
    fn tensor_is_associative_and_multiplicative(a in matrix(2), b in matrix(2), c in matrix(3), d in matrix(3)) {
        prop_assert!(tensor(&tensor(&a, &b), &c).approx_eq(&tensor(&a, &tensor(&b, &c)), 1e-12));
        prop_assert!(tensor(&(&a * &b), &(&c * &d)).approx_eq(&(&tensor(&a, &c) * &tensor(&b, &d)), 1e-12));
    }

    #[test]
    fn squared_projection_is_one_minus_outer(n in unit()) {
        let v = n.to_array();
        let expected = ComplexMatrix::from_fn(3, |i, j| {
            C64::new(if i == j { 1.0 } else { 0.0 } - v[i] * v[j], 0.0)
        });
        let sq = squared_projection(n).unwrap();
        prop_assert!(sq.approx_eq(&expected, 1e-12));
        prop_assert!(sq.projector_defect() <= 1e-12);
        let l = projection(n);
        prop_assert!((&l * &l).approx_eq(&sq, 1e-12));
    }

    #[test]
    fn angular_momentum_commutators(i in 0usize..3) {
        let l = angular_momentum_ops();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        prop_assert!(l[i].commutator(&l[j]).approx_eq(&l[k].scale(C64::new(0.0, 1.0)), 1e-15));
    }

    #[test]
    fn povm_complete_and_consistent(t in any_triad(), contemporaneous in any::<bool>()) {
        let scheme = if contemporaneous { JointScheme::Contemporaneous } else { JointScheme::Sequential };
        let p = scheme.model(&t).povm();
        prop_assert!(p.is_valid(tolerance::POVM));
        prop_assert!(p.completeness_defect() <= 1e-10);
    }

    #[test]
    fn errors_invariant_under_phase_and_conjugation(t in small_triad(), h in hermitian(3), chi in 0.0..TAU, r in 0usize..3) {
        let m = sequential_model(&t);
        let a = squared_projection(t.axis(r)).unwrap();
        let alpha = m.pointers().pointer_observable(r).unwrap();
        let base = errors_heisenberg(&m, &a, &alpha).unwrap();

        let phased = MeasurementModel::new(3, m.pointers().clone(), m.ready_state().clone(),
            m.unitary().scale(C64::from_polar(1.0, chi))).unwrap();
        let e = errors_heisenberg(&phased, &a, &alpha).unwrap();
        prop_assert!((e.retrodictive - base.retrodictive).abs() <= 1e-10);
        prop_assert!((e.predictive - base.predictive).abs() <= 1e-10);

        let v = tensor(&exp_i(&h).unwrap(), &ComplexMatrix::identity(m.ap_dim()));
        let conj = MeasurementModel::new(3, m.pointers().clone(), m.ready_state().clone(),
            &(&v * &m.unitary()) * &v.adjoint()).unwrap();
        let vs = exp_i(&h).unwrap();
        let a2 = &(&vs * &a) * &vs.adjoint();
        let e = errors_heisenberg(&conj, &a2, &alpha).unwrap();
        prop_assert!((e.retrodictive - base.retrodictive).abs() <= 1e-10);
        prop_assert!((e.predictive - base.predictive).abs() <= 1e-10);
    }

    #[test]
    fn errors_invariant_under_triad_rotation(t in small_triad(), w in prop::array::uniform3(-2.0..2.0f64), r in 0usize..3) {
        let rot = rotation_matrix(w);
        let e = |t: &Triad| {
            let m = sequential_model(t);
            let a = squared_projection(t.axis(r)).unwrap();
            errors_heisenberg(&m, &a, &m.pointers().pointer_observable(r).unwrap()).unwrap()
        };
        let (x, y) = (e(&t), e(&t.rotated(&rot)));
        prop_assert!((x.retrodictive - y.retrodictive).abs() <= 1e-9);
        prop_assert!((x.predictive - y.predictive).abs() <= 1e-9);
    }

    #[test]
    fn solver_sound_and_complete_on_subsets(mask in prop::collection::vec(any::<bool>(), 33)) {
        let peres = peres_rays();
        let idx: Vec<usize> = (0..33).filter(|&i| mask[i]).take(16).collect();
        let sub = peres.subset(&idx);
        let os = ortho_structure(&sub, tolerance::ORTHOGONAL);
        let verdict = find_legal_coloring(&os, sub.len());
        if let SolveOutcome::Colorable(c) = &verdict {
            prop_assert!(c.is_total());
            prop_assert!(check_coloring(&os, c).unwrap().is_empty());
        }
        prop_assert_eq!(verdict.is_colorable(), brute_force_colorable(&os));
    }

    #[test]
    fn peres_unsat_under_rotation(w in prop::array::uniform3(-PI..PI)) {
        let rs = peres_rays().rotated(&rotation_matrix(w));
        let os = ortho_structure(&rs, tolerance::ORTHOGONAL);
        prop_assert_eq!(os.triads.len(), 16);
        prop_assert_eq!(os.pairs.len(), 72);
        prop_assert!(!find_legal_coloring(&os, rs.len()).is_colorable());
    }

    #[test]
    fn hidden_illegal_at_least_half(m in prop::array::uniform3(0.5..=1.0f64), v in prop::array::uniform3(0u8..2)) {
        prop_assume!(!is_legal_combination(v));
        let q: [f64; 3] = std::array::from_fn(|r| if v[r] == 1 { m[r] } else { 1.0 - m[r] });
        for r in 0..3 {
            prop_assert!((match_probability(q[r], v[r]) - m[r]).abs() <= 1e-15);
        }
        prop_assert!(hidden_illegal_probability(q) >= 0.5 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn experiment_reproducible(seed in any::<u64>(), sigma in 0.001..0.05f64) {
        let d = AlignmentDistribution::independent(sigma, seed).unwrap();
        let cfg = ExperimentConfig { trials: 40, samples: 200, scheme: JointScheme::Sequential };
        let psi = Ket::from_real(&[1.0, 2.0, 2.0]).normalized();
        let f = ValuationStrategy::default();
        let a = contextuality_experiment(&Triad::canonical(), &f, &d, &psi, &cfg).unwrap();
        let b = contextuality_experiment(&Triad::canonical(), &f, &d, &psi, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}
