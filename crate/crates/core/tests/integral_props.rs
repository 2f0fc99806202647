mod common;

use bvkit::berezin::{berezin_integrate, gaussian_expect, GaussianWeight};
use bvkit::linalg::Matrix;
use bvkit::supermatrix::{det_cofactor, det_even, SuperMatrix};
use bvkit::{Context, Scalar, SuperPoly};
use common::{build, terms};
use proptest::prelude::*;

/// x, y even; t1, t2, t3 odd.
fn ctx() -> Context {
    Context::from_pairs("int", &[("x", 0), ("y", 0), ("t1", 1), ("t2", 1), ("t3", -1)]).unwrap()
}

fn covariance() -> impl Strategy<Value = Matrix> {
    (1i64..=4, -2i64..=2, 1i64..=4)
        .prop_filter("positive definite", |(a, b, c)| a * c > b * b)
        .prop_map(|(a, b, c)| Matrix::from_i64(&[vec![a, b], vec![b, c]]))
}

fn double_factorial(n: i64) -> i64 {
    (1..=n).rev().step_by(2).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn integrals_of_derivatives_vanish(f in terms(5, 6), v in 2usize..5) {
        let c = ctx();
        let f = build(&c, &f);
        prop_assert!(berezin_integrate(&f.left_derive(v), &[v]).unwrap().is_zero());
        prop_assert!(berezin_integrate(&f.left_derive(v), &[2, 3, 4]).unwrap().is_zero());
    }

    #[test]
    fn odd_rescaling_scales_the_integral(f in terms(5, 6), k in 1i64..5, v in 2usize..5) {
        let c = ctx();
        let f = build(&c, &f);
        let scaled = f.substitute(&[(v, SuperPoly::gen(&c, v).scale_int(k))]).unwrap();
        let all = [2usize, 3, 4];
        prop_assert_eq!(berezin_integrate(&scaled, &all).unwrap(), berezin_integrate(&f, &all).unwrap().scale_int(k));
    }

    #[test]
    fn gaussian_matches_one_dimensional_moments(k in 0u32..6, s in 1i64..5) {
        let c = ctx();
        let w = GaussianWeight::by_names(&c, &["x"], Matrix::from_i64(&[vec![s]])).unwrap();
        let got = gaussian_expect(&SuperPoly::var(&c, "x").unwrap().pow(k), &w).unwrap();
        let want = if k % 2 == 1 { 0 } else { double_factorial(k as i64 - 1) * s.pow(k / 2) };
        prop_assert_eq!(got, SuperPoly::int(&c, want));
    }

    #[test]
    fn gaussian_integration_by_parts(f in terms(5, 4), cov in covariance(), i in 0usize..2) {
        // ⟨x_i f⟩ = Σ_j C_ij ⟨∂_j f⟩
        let c = ctx();
        let f = build(&c, &f);
        let w = GaussianWeight::by_names(&c, &["x", "y"], cov.clone()).unwrap();
        let e = |g: &SuperPoly| gaussian_expect(g, &w).unwrap();
        let lhs = e(&(&SuperPoly::gen(&c, i) * &f));
        let mut rhs = SuperPoly::zero(&c);
        for j in 0..2 {
            rhs = &rhs + &e(&f.left_derive(j)).scale(&Scalar::from_rational(cov.get(i, j).clone()));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn even_determinants_agree(entries in prop::collection::vec(terms(5, 2), 9), diag in prop::collection::vec(1i64..4, 3)) {
        let c = ctx();
        let m: Vec<Vec<SuperPoly>> = (0..3)
            .map(|i| (0..3).map(|j| {
                let soul = build(&c, &entries[3 * i + j]).parity_components()[0].clone();
                let e = &soul - &SuperPoly::constant(&c, soul.constant_term());
                if i == j { &e + &SuperPoly::int(&c, diag[i]) } else { e }
            }).collect())
            .collect();
        prop_assert_eq!(det_even(&c, &m), det_cofactor(&c, &m));
    }

    #[test]
    fn berezinian_of_a_product_and_an_inverse(a in 1i64..5, d in 1i64..5, b in terms(5, 2), cc in terms(5, 2)) {
        let c = ctx();
        let odd = |raw| build(&c, raw).parity_components()[1].clone();
        let x = SuperMatrix::new(&c, 1, 1, vec![vec![SuperPoly::int(&c, a)]], vec![vec![odd(&b)]], vec![vec![odd(&cc)]], vec![vec![SuperPoly::int(&c, d)]]).unwrap();
        let inv = x.inverse().unwrap();
        let one = x.mul(&inv).unwrap().berezinian().unwrap();
        prop_assert_eq!(one, SuperPoly::one(&c));
        prop_assert_eq!(&x.berezinian().unwrap() * &inv.berezinian().unwrap(), SuperPoly::one(&c));
        // with B = C = 0 the Berezinian is a / d
        let diag = SuperMatrix::new(&c, 1, 1, vec![vec![SuperPoly::int(&c, a)]], vec![vec![SuperPoly::zero(&c)]], vec![vec![SuperPoly::zero(&c)]], vec![vec![SuperPoly::int(&c, d)]]).unwrap();
        prop_assert_eq!(diag.berezinian().unwrap(), SuperPoly::constant(&c, Scalar::from_ratio(a, d)));
    }
}
