#![allow(dead_code)]

use bvkit::{Context, Monomial, Scalar, SuperPoly};
use proptest::prelude::*;

/// x, y even of ghost 0; a, c odd of ghost 1; b odd of ghost −1; u even of ghost 2.
pub fn mixed_context() -> Context {
    Context::from_pairs("mixed", &[("x", 0), ("y", 0), ("a", 1), ("b", -1), ("c", 1), ("u", 2)]).unwrap()
}

/// Raw term lists; exponents of odd generators are reduced mod 2 when built.
pub fn terms(n_gens: usize, max_terms: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..=2, n_gens), -3i64..=3), 0..=max_terms)
}

pub fn build(ctx: &Context, raw: &[(Vec<u32>, i64)]) -> SuperPoly {
    let mut p = SuperPoly::zero(ctx);
    for (e, c) in raw {
        let e: Vec<u32> = e.iter().enumerate().map(|(i, k)| if ctx.is_odd(i) { k % 2 } else { *k }).collect();
        p = &p + &SuperPoly::term(ctx, Monomial(e), Scalar::from_int(*c));
    }
    p
}

/// The part of `p` with the given parity.
pub fn of_parity(p: &SuperPoly, parity: u8) -> SuperPoly {
    p.parity_components()[parity as usize].clone()
}
