use gtlab::calculus::{frechet_log, frechet_log_quadrature, q_form, QuadratureRule};
use gtlab::cli::{parse_betas, parse_gen_config, parse_input};
use gtlab::inequalities::check_gt_multi;
use gtlab::matcore::json::parse_matrix;
use gtlab::matcore::{
    hermitian_eig, matrix_exp, matrix_log, ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix,
};
use gtlab::randgen::{rand_contraction_tuple, rand_hermitian, rand_pd, rand_unitary, Stream};
use gtlab::report::{slack_tol, Dims, TrialReport};
use gtlab::tracefn::{ContractionTuple, Resolution};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    u.try_mul(m).unwrap().try_mul(&u.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exp_log_round_trip(seed: u64, n in 1usize..=6, scale in 0.0f64..6.0) {
        let mut s = Stream::new(seed, 0);
        let h = rand_hermitian(n, scale, &mut s).unwrap();
        let back = matrix_log(&matrix_exp(&h).unwrap());
        prop_assert!(back.matrix().try_sub(h.matrix()).unwrap().frobenius_norm() <= 1e-12 * (1.0 + scale) * n as f64);
        let a = rand_pd(n, 1e4, &mut s).unwrap();
        let again = matrix_exp(&matrix_log(&a)).unwrap();
        prop_assert!(again.matrix().relative_distance(a.matrix()) <= 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed: u64, n in 1usize..=8) {
        let h = rand_hermitian(n, 3.0, &mut Stream::new(seed, 1)).unwrap();
        let spectral = hermitian_eig(&h).unwrap();
        prop_assert!(spectral.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let rebuilt = spectral.apply(|x| x);
        prop_assert!(rebuilt.matrix().relative_distance(h.matrix()) <= 1e-12);
    }

    #[test]
    fn q_form_unitary_covariance(seed: u64, n in 1usize..=6) {
        let mut s = Stream::new(seed, 2);
        let x = rand_pd(n, 1e2, &mut s).unwrap();
        let h = s.complex_gaussian_matrix(n, n);
        let u = rand_unitary(n, &mut s).unwrap();
        let xu = PositiveDefiniteMatrix::from_matrix(conjugate(&u, x.matrix())).unwrap();
        let q0 = q_form(&x, &h).unwrap();
        let q1 = q_form(&xu, &conjugate(&u, &h)).unwrap();
        prop_assert!(rel(q0, q1) <= 1e-9, "{q0} vs {q1}");
    }

    #[test]
    fn q_form_positive_and_homogeneous(seed: u64, n in 1usize..=8, t in 0.05f64..20.0) {
        let mut s = Stream::new(seed, 3);
        let x = rand_pd(n, 1e3, &mut s).unwrap();
        let h = s.complex_gaussian_matrix(n, n);
        let q = q_form(&x, &h).unwrap();
        prop_assert!(q >= -1e-12);
        let scaled = q_form(&x.scale(t).unwrap(), &h.scale(t)).unwrap();
        prop_assert!(rel(scaled, t * q) <= 1e-10);
    }

    #[test]
    fn gt_multi_unitary_covariance(seed: u64) {
        let mut s = Stream::new(seed, 4);
        let k = s.integer(1, 3);
        let n = s.integer(1, 4);
        let m = s.integer(1, (k * n).min(4));
        let tuple = rand_contraction_tuple(k, n, m, true, &mut s).unwrap();
        let l = rand_hermitian(m, 4.0, &mut s).unwrap();
        let b: Vec<_> = (0..k).map(|_| rand_hermitian(n, 4.0, &mut s).unwrap()).collect();
        let u = rand_unitary(n, &mut s).unwrap();
        let v = rand_unitary(m, &mut s).unwrap();
        let moved_tuple = ContractionTuple::new(
            tuple.blocks().iter().map(|h| u.try_mul(h).unwrap().try_mul(&v.adjoint()).unwrap()).collect(),
            Resolution::Exact,
        ).unwrap();
        let moved_l = HermitianMatrix::new(conjugate(&v, l.matrix())).unwrap();
        let moved_b: Vec<_> = b.iter().map(|x| HermitianMatrix::new(conjugate(&u, x.matrix())).unwrap()).collect();
        let r0 = check_gt_multi(&l, &tuple, &b).unwrap();
        let r1 = check_gt_multi(&moved_l, &moved_tuple, &moved_b).unwrap();
        prop_assert!(rel(r0.lhs, r1.lhs) <= 1e-9);
        prop_assert!(rel(r0.rhs, r1.rhs) <= 1e-9);
        prop_assert!(r0.pass && r1.pass);
    }

    #[test]
    fn frechet_log_matches_finite_differences(seed: u64, n in 1usize..=5) {
        let mut s = Stream::new(seed, 5);
        let a = rand_pd(n, 1e3, &mut s).unwrap();
        let b = rand_hermitian(n, 1.0, &mut s).unwrap();
        let h = 1e-4 * a.min_eigenvalue();
        let plus = PositiveDefiniteMatrix::new(a.hermitian().try_add(&b.scale(h)).unwrap()).unwrap();
        let minus = PositiveDefiniteMatrix::new(a.hermitian().try_sub(&b.scale(h)).unwrap()).unwrap();
        let fd = matrix_log(&plus).matrix().try_sub(matrix_log(&minus).matrix()).unwrap().scale(0.5 / h);
        let exact = frechet_log(&a, b.matrix()).unwrap();
        let err = fd.try_sub(&exact).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-4 * exact.frobenius_norm().max(1e-12));
    }

    #[test]
    fn frechet_log_matches_quadrature(seed: u64, n in 1usize..=5) {
        let mut s = Stream::new(seed, 6);
        let a = rand_pd(n, 1e3, &mut s).unwrap();
        let b = s.complex_gaussian_matrix(n, n);
        let quad = frechet_log_quadrature(&a, &b, &QuadratureRule::default()).unwrap();
        let exact = frechet_log(&a, &b).unwrap();
        prop_assert!(quad.try_sub(&exact).unwrap().frobenius_norm() <= 1e-6 * exact.frobenius_norm());
    }

    #[test]
    fn exact_tuples_resolve_identity(seed: u64, k in 1usize..=4, n in 1usize..=5, m in 1usize..=5) {
        prop_assume!(k * n >= m);
        let t = rand_contraction_tuple(k, n, m, true, &mut Stream::new(seed, 7)).unwrap();
        prop_assert!(t.resolution_residual().unwrap() <= 1e-12 * (m as f64).sqrt());
    }

    #[test]
    fn trial_streams_do_not_depend_on_order(seed: u64, i in 0u64..50) {
        let fresh = Stream::for_trial(seed, "suite", i).next_u64();
        for j in 0..i.min(5) {
            let _ = Stream::for_trial(seed, "suite", j).next_u64();
        }
        prop_assert_eq!(fresh, Stream::for_trial(seed, "suite", i).next_u64());
    }

    #[test]
    fn report_pass_iff_slack_within_tolerance(lhs in -1e6f64..1e6, rhs in -1e6f64..1e6) {
        let r = TrialReport::inequality("p", lhs, rhs, Dims::square(1));
        prop_assert_eq!(r.slack, rhs - lhs);
        prop_assert_eq!(r.pass, rhs - lhs >= -slack_tol(lhs, rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsers_never_panic_on_text(text in "\\PC{0,200}") {
        let _ = parse_matrix(&text);
        let _ = parse_input(&text);
        let _ = parse_gen_config(&text);
        let _ = parse_betas(&text);
    }

    #[test]
    fn parsers_never_panic_on_json_shapes(
        rows in 0usize..5,
        cols in 0usize..5,
        data in proptest::collection::vec((any::<f64>(), any::<f64>()), 0..30),
        key in "[A-Za-z_]{1,8}",
        lo in 0usize..4,
        hi in 0usize..4,
        x in any::<f64>(),
    ) {
        let entries: Vec<String> = data.iter().map(|(a, b)| format!("[{a:e}, {b:e}]")).collect();
        let matrix = format!(r#"{{"rows": {rows}, "cols": {cols}, "data": [{}]}}"#, entries.join(","));
        let _ = parse_matrix(&matrix);
        let _ = parse_input(&format!(r#"{{"L": {matrix}, "H": [{matrix}], "{key}": []}}"#));
        let _ = parse_gen_config(&format!(r#"{{"n_range": [{lo}, {hi}], "cond_cap": {x:e}, "scale": {x:e}}}"#));
        let _ = parse_betas(&format!("{x:e},{lo}"));
    }
}

#[test]
fn parsed_matrices_are_finite_and_shaped() {
    let m = parse_matrix(r#"{"rows": 1, "cols": 2, "data": [[1, 2], [3, -4]]}"#).unwrap();
    assert_eq!(m.shape(), (1, 2));
    assert!(parse_matrix(r#"{"rows": 1, "cols": 1, "data": [[1e400, 0]]}"#).is_err());
}
