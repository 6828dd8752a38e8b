mod common;

use covinterp::filter::make_caratheodory;
use covinterp::numkit::{
    c64, circle_points, det_poly, min_hermitian_eigenvalue, smallest_generalized_eig, solve_stein, spectral_factor, Complex64,
    ComplexMatrix, Polynomial,
};
use covinterp::realize::RationalTransferFunction;
use proptest::prelude::*;
use rand::Rng;

fn random_poly(rng: &mut impl Rng, degree: usize) -> Polynomial {
    Polynomial::new(
        (0..=degree)
            .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stein_solution_matches_series(seed in any::<u64>(), n in 1usize..=8, rho in 0.05f64..0.9) {
        let mut rng = common::rng(seed);
        let a = common::random_stable_matrix(&mut rng, n, rho);
        let q = common::random_complex_matrix(&mut rng, n, n);
        let x = solve_stein(&a, &q).unwrap();
        let residual = (&x - &a * &x * a.adjoint() - &q).norm() / q.norm();
        prop_assert!(residual < 1e-10, "residual {residual:e}");

        // ρ^{2K} < 1e-16 leaves room for the transient growth of non-normal A
        let k = ((1e-16f64).ln() / (2.0 * rho.ln())).ceil() as usize;
        let mut series = ComplexMatrix::zeros(n, n);
        let mut term = q.clone();
        for _ in 0..=k {
            series += &term;
            term = &a * term * a.adjoint();
        }
        let diff = (&x - &series).norm() / series.norm();
        prop_assert!(diff < 1e-8, "series mismatch {diff:e}");
    }

    #[test]
    fn det_poly_matches_direct_determinants(seed in any::<u64>(), n in 0usize..=8) {
        let mut rng = common::rng(seed);
        let m = common::random_complex_matrix(&mut rng, n, n);
        let p = det_poly(&m).unwrap();
        prop_assert!(p.degree() <= n);
        for _ in 0..64 {
            let z = common::point_in_annulus(&mut rng, 0.0, 1.0);
            let direct = (ComplexMatrix::identity(n, n) - &m * z).determinant();
            let scale: f64 = p.coeffs().iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum::<f64>().max(1.0);
            prop_assert!((p.eval(z) - direct).norm() <= 1e-10 * scale, "z = {z}: {} vs {direct}", p.eval(z));
        }
    }

    #[test]
    fn pencil_eigenpair_is_extremal(seed in any::<u64>(), n in 1usize..=6, rank in 1usize..=6) {
        let mut rng = common::rng(seed);
        let g = common::random_complex_matrix(&mut rng, n, n);
        let s = &g * g.adjoint() + ComplexMatrix::identity(n, n) * Complex64::new(0.1, 0.0);
        let f = common::random_complex_matrix(&mut rng, n, rank.min(n));
        let m = &f * f.adjoint();
        let e = smallest_generalized_eig(&s, &m).unwrap();
        let v = ComplexMatrix::from_column_slice(n, 1, e.vector.as_slice());
        let lambda = e.value;
        let residual = (&s * &v - &m * &v * Complex64::new(lambda, 0.0)).norm();
        prop_assert!(residual <= 1e-9 * (s.norm() + lambda * m.norm()) * v.norm(), "residual {residual:e}");
        let shifted = &s - &m * Complex64::new(lambda, 0.0);
        prop_assert!(min_hermitian_eigenvalue(&shifted) >= -1e-9 * s.norm());
        let past = &s - &m * Complex64::new(lambda * (1.0 + 1e-4), 0.0);
        prop_assert!(min_hermitian_eigenvalue(&past) < 0.0);
    }

    #[test]
    fn spectral_factor_identity(seed in any::<u64>(), deg_a in 0usize..=6, deg_b in 0usize..=6) {
        let mut rng = common::rng(seed);
        let roots: Vec<Complex64> = (0..deg_a).map(|_| common::point_in_annulus(&mut rng, 1.2, 3.0)).collect();
        let a = Polynomial::from_roots(&roots);
        let b = random_poly(&mut rng, deg_b.min(deg_a.max(1)));
        let d = spectral_factor(&b, &a).unwrap();
        if d.degree() > 0 {
            prop_assert!(d.min_root_modulus().unwrap() > 1.0);
        }
        let grid = circle_points(256, 1.0);
        let peak = grid.iter().map(|&z| (b.eval(z) / a.eval(z)).norm_sqr()).fold(0.0, f64::max);
        for z in grid {
            let lhs = (d.eval(z) / a.eval(z)).re;
            let rhs = (b.eval(z) / a.eval(z)).norm_sqr() / 2.0;
            prop_assert!((lhs - rhs).abs() <= 1e-8 * peak.max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn filter_constructor_postconditions(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = common::rng(seed);
        let f = common::random_filter(&mut rng, n, 0.9, 0.05);
        let g = f.gramian();
        let residual = (g - f.a() * g * f.a().adjoint() - f.b() * f.b().adjoint()).norm() / g.norm();
        prop_assert!(residual < 1e-12);
        prop_assert!(min_hermitian_eigenvalue(g) > 0.0);
        let sv = f.reach().singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        prop_assert!(lo > 1e-10 * hi);
    }

    #[test]
    fn shift_identity_of_g(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = common::rng(seed);
        let f = common::random_filter(&mut rng, n, 0.9, 0.05);
        for _ in 0..16 {
            let z = common::point_in_annulus(&mut rng, 0.1, 1.0);
            let g = f.eval_g(z).unwrap();
            let lhs = f.a() * &g;
            let rhs = (&g - f.b()) / z;
            prop_assert!((&lhs - &rhs).norm() <= 1e-12 * g.norm().max(1.0) / z.norm());
        }
    }

    #[test]
    fn ip_g_matches_quadrature(seed in any::<u64>(), n in 1usize..=5, degree in 0usize..=4) {
        let mut rng = common::rng(seed);
        let f = common::random_filter(&mut rng, n, 0.7, 0.1);
        let w = common::random_stable_rational(&mut rng, degree, 1.5, 3.0);
        let exact = f.ip_g_scalar(&w).unwrap();
        let grid = circle_points(1024, 1.0);
        let mut quad = ComplexMatrix::zeros(n, 1);
        for &z in &grid {
            quad += f.eval_g(z).unwrap() * w.eval(z).conj();
        }
        quad /= Complex64::new(grid.len() as f64, 0.0);
        prop_assert!((&exact - &quad).norm() <= 1e-6 * exact.norm().max(1.0), "{:e}", (&exact - &quad).norm());
    }

    #[test]
    fn caratheodory_ip_gives_taylor_coefficients(seed in any::<u64>(), n in 1usize..=8, degree in 0usize..=4) {
        let mut rng = common::rng(seed);
        let w = common::random_stable_rational(&mut rng, degree, 1.2, 3.0);
        let f = make_caratheodory(n).unwrap();
        let ip = f.ip_g_scalar(&w).unwrap();
        let taylor = w.impulse_response(n).unwrap();
        for k in 0..n {
            prop_assert!((ip[(k, 0)] - taylor[k].conj()).norm() <= 1e-12 * taylor.iter().map(|t| t.norm()).fold(1.0, f64::max));
        }
    }
}

#[test]
fn constant_functions_have_trivial_taylor_data() {
    let f = make_caratheodory(3).unwrap();
    let ip = f.ip_g_scalar(&RationalTransferFunction::constant(c64(2.0, -1.0))).unwrap();
    assert_eq!(ip[(0, 0)], c64(2.0, 1.0));
    assert_eq!(ip[(1, 0)], c64(0.0, 0.0));
}
