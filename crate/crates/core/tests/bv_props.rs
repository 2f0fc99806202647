mod common;

use bvkit::algebra::sign;
use bvkit::bv::BVSpace;
use bvkit::cartan::is_cohomological;
use bvkit::SuperPoly;
use common::{build, of_parity, terms};
use proptest::prelude::*;

/// x/xs, c/cs, t/ts with ghost numbers 0, 1, −1.
fn space() -> BVSpace {
    BVSpace::build("props", &[("x", 0, "xs"), ("c", 1, "cs"), ("t", -1, "ts")], &[]).unwrap()
}

fn gh_part(p: &SuperPoly, gh: i32) -> SuperPoly {
    p.gh_components().remove(&gh).unwrap_or_else(|| SuperPoly::zero(p.context()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn laplacian_squares_to_zero(f in terms(6, 6)) {
        let s = space();
        let f = build(s.context(), &f);
        prop_assert!(s.laplacian(&s.laplacian(&f).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn laplacian_generates_the_antibracket(f in terms(6, 4), g in terms(6, 4)) {
        let s = space();
        let (f, g) = (build(s.context(), &f), build(s.context(), &g));
        prop_assert!(s.leibniz_residual(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn antibracket_is_graded_lie(f in terms(6, 3), g in terms(6, 3), h in terms(6, 3), pf in 0u8..2, pg in 0u8..2) {
        let s = space();
        let ctx = s.context();
        let (f, g, h) = (of_parity(&build(ctx, &f), pf), of_parity(&build(ctx, &g), pg), build(ctx, &h));
        prop_assert!(s.poisson().antisymmetry_residual(&f, &g).unwrap().is_zero());
        prop_assert!(s.poisson().jacobi_residual(&f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn laplacian_is_a_derivation_of_the_bracket(f in terms(6, 4), g in terms(6, 4), pf in 0u8..2) {
        let s = space();
        let (f, g) = (of_parity(&build(s.context(), &f), pf), build(s.context(), &g));
        let lap = |h: &SuperPoly| s.laplacian(h).unwrap();
        let br = |a: &SuperPoly, b: &SuperPoly| s.antibracket(a, b).unwrap();
        prop_assert_eq!(lap(&br(&f, &g)), &br(&lap(&f), &g) - &br(&f, &lap(&g)).scale(&sign(pf as i64)));
    }

    #[test]
    fn hamiltonian_field_acts_by_the_bracket(a in terms(6, 4), g in terms(6, 4)) {
        let s = space();
        let act = gh_part(&of_parity(&build(s.context(), &a), 0), 0);
        let g = build(s.context(), &g);
        let q = s.hamiltonian_vf(&act).unwrap();
        prop_assert_eq!(q.apply(&g).unwrap(), s.antibracket(&act, &g).unwrap());
    }

    #[test]
    fn master_equation_iff_cohomological(a in terms(6, 5)) {
        let s = space();
        let act = gh_part(&of_parity(&build(s.context(), &a), 0), 0);
        let q = s.hamiltonian_vf(&act).unwrap();
        prop_assert_eq!(s.check_cme(&act).unwrap().pass, is_cohomological(&q).unwrap().cohomological);
    }
}

#[test]
fn generated_actions_include_solutions_and_non_solutions() {
    let s = space();
    let v = |n: &str| SuperPoly::var(s.context(), n).unwrap();
    // xs·c generates the shift x ↦ x + c: (S, S) = 0
    assert!(s.check_cme(&(&v("xs") * &v("c"))).unwrap().pass);
    // so does xs·c·x, since its field c·x∂ₓ squares to a multiple of c²
    assert!(s.check_cme(&(&(&v("xs") * &v("c")) * &v("x"))).unwrap().pass);
    // xs·c + ts·x does not: [c∂ₓ, x∂ₜ] = c∂ₜ
    let broken = &(&v("xs") * &v("c")) + &(&v("ts") * &v("x"));
    assert!(!s.check_cme(&broken).unwrap().pass);
    assert!(!is_cohomological(&s.hamiltonian_vf(&broken).unwrap()).unwrap().cohomological);
}
