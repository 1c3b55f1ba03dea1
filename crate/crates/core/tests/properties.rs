use blocktoeplitz::blaschke::{coanalytic_decompose, coprime_matrix_check_laurent, gcd_lcm, FiniteBlaschkeProduct};
use blocktoeplitz::decide::{decide_hyponormal, verify_in_c};
use blocktoeplitz::linalg::{identity, max_abs, max_abs_diff, spectral_norm};
use blocktoeplitz::modelspace::{build_m, hermite_fejer_solve, poly_of_m};
use blocktoeplitz::operators::{hankel_block, k_hypo_window, selfcommutator_exact, toeplitz_block, PsdVerdict};
use blocktoeplitz::symalg::{MatrixLaurentSymbol, Poly, RationalAnalytic};
use blocktoeplitz::{CMat, Complex64, Tolerances};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn arb_c() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn arb_mat(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec(arb_c(), n * n).prop_map(move |v| CMat::from_vec(n, n, v))
}

fn arb_symbol(n: usize, lo: i32, hi: i32) -> impl Strategy<Value = MatrixLaurentSymbol> {
    prop::collection::vec(arb_mat(n), (hi - lo + 1) as usize)
        .prop_map(move |ms| MatrixLaurentSymbol::from_coeffs(n, (lo..=hi).zip(ms)).unwrap())
}

/// Zeros drawn from a small pool so that products share factors.
fn arb_blaschke() -> impl Strategy<Value = FiniteBlaschkeProduct> {
    let pool = [c(0.0, 0.0), c(0.5, 0.0), c(0.0, -0.3), c(0.2, 0.4)];
    prop::collection::vec(0..3usize, pool.len()).prop_map(move |mults| {
        let zeros: Vec<_> = pool.iter().zip(mults).filter(|(_, m)| *m > 0).map(|(&a, m)| (a, m)).collect();
        FiniteBlaschkeProduct::from_zeros(&zeros).unwrap()
    })
}

fn same_zeros(a: &FiniteBlaschkeProduct, b: &FiniteBlaschkeProduct) -> bool {
    a.divides(b) && b.divides(a)
}

fn circle(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiply_associative_and_distributive(
        a in arb_symbol(2, -2, 2), b in arb_symbol(2, -1, 2), d in arb_symbol(2, -2, 1)
    ) {
        let left = a.multiply(&b).unwrap().multiply(&d).unwrap();
        let right = a.multiply(&b.multiply(&d).unwrap()).unwrap();
        prop_assert!(left.approx_eq_tol(&right, 1e-12 * (1.0 + left.sup_norm(64))));
        let dist = a.multiply(&b.add(&d).unwrap()).unwrap();
        let sum = a.multiply(&b).unwrap().add(&a.multiply(&d).unwrap()).unwrap();
        prop_assert!(dist.approx_eq_tol(&sum, 1e-12 * (1.0 + dist.sup_norm(64))));
    }

    #[test]
    fn normality_ignores_scalar_shift(a in arb_symbol(2, -1, 1), s in arb_c()) {
        let shifted = a.add(&MatrixLaurentSymbol::constant(identity(2) * s)).unwrap();
        prop_assert!((a.normality_defect() - shifted.normality_defect()).abs() < 1e-12);
    }

    #[test]
    fn gcd_lcm_laws(a in arb_blaschke(), b in arb_blaschke(), d in arb_blaschke()) {
        let (g_ab, l_ab) = gcd_lcm(&a, &b);
        let (g_ba, l_ba) = gcd_lcm(&b, &a);
        prop_assert!(same_zeros(&g_ab, &g_ba) && same_zeros(&l_ab, &l_ba));
        let (g_aa, l_aa) = gcd_lcm(&a, &a);
        prop_assert!(same_zeros(&g_aa, &a) && same_zeros(&l_aa, &a));
        let (g_bd, l_bd) = gcd_lcm(&b, &d);
        let g1 = gcd_lcm(&g_ab, &d).0;
        let g2 = gcd_lcm(&a, &g_bd).0;
        let l1 = gcd_lcm(&l_ab, &d).1;
        let l2 = gcd_lcm(&a, &l_bd).1;
        prop_assert!(same_zeros(&g1, &g2) && same_zeros(&l1, &l2));
        prop_assert_eq!(g_ab.degree() + l_ab.degree(), a.degree() + b.degree());
    }

    #[test]
    fn blaschke_degree_additive_and_unimodular(a in arb_blaschke(), b in arb_blaschke()) {
        let p = a.mul(&b);
        prop_assert_eq!(p.degree(), a.degree() + b.degree());
        for k in 0..16 {
            prop_assert!((p.eval(circle(k, 16)).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coanalytic_decomposition_reconstructs(
        coeffs in prop::collection::vec(arb_c(), 1..4),
        pole in (1.3..3.0f64, 0.0..6.2f64),
    ) {
        let mut num = vec![c(0.0, 0.0)];
        num.extend(coeffs);
        let beta = Complex64::from_polar(pole.0, pole.1);
        let f = RationalAnalytic::new(Poly::new(num), vec![(beta, 1)]).unwrap();
        prop_assume!(!f.is_zero());
        let (theta, b) = coanalytic_decompose(&f).unwrap();
        for k in 0..256 {
            let z = circle(k, 256);
            prop_assert!((theta.eval(z) * b.eval(z).conj() - f.eval(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_outer_factor_never_coprime(f in arb_symbol(1, 0, 2), g in arb_symbol(1, 0, 2), theta in arb_blaschke()) {
        prop_assume!(!theta.is_constant());
        let b = MatrixLaurentSymbol::from_entries(2, &[f.clone(), f, g.clone(), g]).unwrap();
        prop_assert!(!coprime_matrix_check_laurent(&b, &theta, 1e-8).unwrap().coprime);
    }

    #[test]
    fn model_is_a_contraction(zeros in prop::collection::vec((0.0..0.95f64, 0.0..6.2f64), 1..6)) {
        let zs: Vec<_> = zeros.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let m = build_m(&zs).unwrap();
        prop_assert!(spectral_norm(&m.m) <= 1.0 + 1e-12);
    }

    #[test]
    fn hermite_fejer_degree_and_residual(
        mults in prop::collection::vec(1..3usize, 1..4),
        seed in prop::collection::vec(arb_mat(2), 12),
        bseed in prop::collection::vec(arb_mat(2), 12),
    ) {
        let nodes: Vec<_> = mults.iter().enumerate()
            .map(|(i, &m)| (Complex64::from_polar(0.3 + 0.2 * i as f64, 1.7 * i as f64), m))
            .collect();
        let mut it = seed.into_iter();
        let mut bit = bseed.into_iter();
        let mut a_data = Vec::new();
        let mut b_data = Vec::new();
        for &(_, m) in &nodes {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for j in 0..m {
                let mut x = it.next().unwrap() * c(0.3, 0.0);
                if j == 0 {
                    x += identity(2);
                }
                a.push(x);
                b.push(bit.next().unwrap());
            }
            a_data.push(a);
            b_data.push(b);
        }
        let d: usize = mults.iter().sum();
        let k = hermite_fejer_solve(&nodes, &a_data, &b_data).unwrap();
        let hi = k.poly.degree_range().map_or(0, |r| r.1);
        prop_assert!(hi < d as i32);
        prop_assert!(k.poly.degree_range().is_none_or(|r| r.0 >= 0));
        prop_assert!(k.interpolation_residual <= 1e-9, "residual {}", k.interpolation_residual);
    }

    #[test]
    fn toeplitz_product_defect_is_hankel_product(a in arb_symbol(2, -2, 2), b in arb_symbol(2, -2, 2)) {
        let w = 6;
        let big = w + 4;
        let ab = a.multiply(&b).unwrap();
        let lhs = toeplitz_block(&ab, big) - toeplitz_block(&a, big) * toeplitz_block(&b, big);
        let rhs = hankel_block(&a.adjoint(), big).adjoint() * hankel_block(&b, big);
        let n = 2 * w;
        prop_assert!(max_abs_diff(&lhs.view((0, 0), (n, n)).into_owned(), &rhs.view((0, 0), (n, n)).into_owned()) < 1e-12);
    }

    #[test]
    fn hankel_adjoint_is_hankel_of_tilde(a in arb_symbol(2, -3, 2)) {
        let w = 5;
        prop_assert!(max_abs_diff(&hankel_block(&a, w).adjoint(), &hankel_block(&a.tilde(), w)) < 1e-15);
    }

    #[test]
    fn selfcommutator_ignores_scalar_shift(a in arb_symbol(2, -2, 2), s in arb_c()) {
        let shifted = a.add(&MatrixLaurentSymbol::constant(identity(2) * s)).unwrap();
        let x = selfcommutator_exact(&a).block;
        let y = selfcommutator_exact(&shifted).block;
        prop_assert!(max_abs_diff(&x, &y) < 1e-12 * (1.0 + max_abs(&x)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn not_psd_persists_as_window_grows(a in arb_symbol(1, -2, 2), k in 1..3usize) {
        let tol = Tolerances::default();
        let small = k_hypo_window(&a, k, 4, &tol).unwrap();
        prop_assume!(small.verdict == PsdVerdict::NotPsd);
        for w in [6, 9] {
            let r = k_hypo_window(&a, k, w, &tol).unwrap();
            prop_assert_eq!(r.verdict, PsdVerdict::NotPsd);
            prop_assert!(r.min_eigenvalue <= small.min_eigenvalue + 1e-9);
        }
    }

    #[test]
    fn verdict_ignores_scalar_shift(a in arb_symbol(1, -2, 3), s in arb_c()) {
        let shifted = a.add(&MatrixLaurentSymbol::constant(identity(1) * s)).unwrap();
        let v = decide_hyponormal(&a).unwrap();
        let u = decide_hyponormal(&shifted).unwrap();
        prop_assert_eq!(v.tag(), u.tag());
        match (v.sigma_max, u.sigma_max) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-8),
            (x, y) => prop_assert_eq!(x.is_some(), y.is_some()),
        }
    }

    #[test]
    fn defect_unchanged_by_other_members(h in prop::collection::vec(arb_c(), 1..4)) {
        // K + z²H is another member of C(φ) when θ = z²
        let phi = MatrixLaurentSymbol::scalar([(-2, c(1.0, 0.0)), (-1, c(2.0, 0.0)), (1, c(1.0, 0.0)), (2, c(2.0, 0.0))]);
        let v = decide_hyponormal(&phi).unwrap();
        let k = v.interpolant.as_ref().unwrap().poly.clone();
        let model = v.model.as_ref().unwrap();
        let extra = MatrixLaurentSymbol::scalar(h.iter().enumerate().map(|(i, &x)| (i as i32 + 2, x)));
        let other = k.add(&extra).unwrap();
        prop_assert!(verify_in_c(&phi, &other, 1e-9).unwrap().member);
        let km = poly_of_m(&other, model).unwrap();
        let defect = identity(km.nrows()) - km.adjoint() * &km;
        prop_assert!(max_abs_diff(&defect, v.defect.as_ref().unwrap()) < 1e-8);
    }
}

#[test]
fn model_at_origin_is_nilpotent() {
    for d in 1..6 {
        let m = build_m(&vec![c(0.0, 0.0); d]).unwrap().m;
        let mut p = identity(d);
        for _ in 0..d {
            p = &p * &m;
        }
        assert!(max_abs(&p) == 0.0, "d = {d}");
    }
}
