//! The ten acceptance criteria, one line of output each.
//!
//! The report goes to stderr even when test output is captured.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use bvkit::algebra::sign;
use bvkit::berezin::GaussianWeight;
use bvkit::bfv::{ghost_extend, n_mod_i_dimension, ConstraintSystem};
use bvkit::bv::{BVSpace, GradedPoisson};
use bvkit::cartan::VectorField;
use bvkit::gauge::{check_thm_bv1, check_thm_bv2, chain_map_residual, bv_pushforward, FiberSplit, GaugeFermion};
use bvkit::graphs::{
    codim1_strata_closed, enumerate_graphs, enumerate_labeled, loop_number, FeynmanGraph, GraphFlags,
};
use bvkit::linalg::{Matrix, Q};
use bvkit::models::{
    annulus, build_bf, chain_contraction, circle, collar, contraction_change, disk, dual_interval, effective_action,
    glue, interval, states_equivalent, ChainComplexModel, DiscreteState, Match,
};
use bvkit::supermatrix::{check_multiplicative, det_even, inverse_even, mat_mul, unit_inverse, SuperMatrix};
use bvkit::{Context, Generator, Monomial, Scalar, SuperPoly};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rng8 = ChaCha8Rng;

// ---------------------------------------------------------------- helpers

fn mono_parity(ctx: &Context, e: &[u32]) -> u8 {
    (e.iter().enumerate().filter(|(i, _)| ctx.is_odd(*i)).map(|(_, k)| *k).sum::<u32>() % 2) as u8
}

fn mono_gh(ctx: &Context, e: &[u32]) -> i32 {
    e.iter().enumerate().map(|(i, k)| ctx.generator(i).gh * *k as i32).sum()
}

/// Up to `terms` random monomials in `vars` of degree ≤ `max_deg` accepted by
/// `keep(parity, gh)`, with nonzero coefficients in −3..=3.
fn random_poly(
    rng: &mut Rng8,
    ctx: &Context,
    vars: &[usize],
    terms: usize,
    max_deg: u32,
    keep: impl Fn(u8, i32) -> bool,
) -> SuperPoly {
    let mut out = SuperPoly::zero(ctx);
    let mut found = 0;
    for _ in 0..terms * 40 {
        if found == terms {
            break;
        }
        let mut e = vec![0u32; ctx.len()];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            let v = *vars.choose(rng).unwrap();
            if ctx.is_odd(v) && e[v] == 1 {
                continue;
            }
            e[v] += 1;
        }
        if !keep(mono_parity(ctx, &e), mono_gh(ctx, &e)) {
            continue;
        }
        let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
        out = &out + &SuperPoly::term(ctx, Monomial(e), Scalar::from_int(c));
        found += 1;
    }
    out
}

fn all_vars(ctx: &Context) -> Vec<usize> {
    (0..ctx.len()).collect()
}

/// Darboux bracket of degree k written out term by term: for each pair (a, b)
/// with {a, b} = 1, f∂⃖_a ∂⃗_b g + ε f∂⃖_b ∂⃗_a g where {b, a} = ε.
fn darboux_oracle(ctx: &Context, k: i32, pairs: &[(usize, usize)], f: &SuperPoly, g: &SuperPoly) -> SuperPoly {
    let mut out = SuperPoly::zero(ctx);
    for &(a, b) in pairs {
        let sa = (ctx.generator(a).gh + k) as i64;
        let sb = (ctx.generator(b).gh + k) as i64;
        let eps = -&sign(sa * sb);
        out = &out + &(&f.right_derive(a) * &g.left_derive(b));
        out = &out + &(&f.right_derive(b) * &g.left_derive(a)).scale(&eps);
    }
    out
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn finish(n: usize, name: &str, started: Instant, limit: Option<Duration>, o: Outcome) -> bool {
    let took = started.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let ok = o.pass && in_time;
    let budget = limit.map(|l| format!(" / limit {}s", l.as_secs())).unwrap_or_default();
    // written to the stderr handle directly so the line survives output capture
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n:>2} {name:<28} {}  ({:.1}s{budget})  {}",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        o.detail
    );
    ok
}

// ---------------------------------------------------------------- 1

fn random_darboux_context(rng: &mut Rng8, k: i32) -> (Context, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=3);
    let mut gens = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        let gq = rng.gen_range(-2..=2);
        gens.push(Generator::new(format!("q{i}"), gq));
        gens.push(Generator::new(format!("p{i}"), -k - gq));
        pairs.push((2 * i, 2 * i + 1));
    }
    (Context::new("k", gens).unwrap(), pairs)
}

fn random_field(rng: &mut Rng8, ctx: &Context, degree: i32) -> VectorField {
    let vars = all_vars(ctx);
    let comps: Vec<(usize, SuperPoly)> = (0..ctx.len())
        .map(|z| {
            let want = ctx.generator(z).gh + degree;
            (z, random_poly(rng, ctx, &vars, 2, 2, |_, gh| gh == want))
        })
        .collect();
    VectorField::new(ctx, degree, comps).unwrap()
}

fn koszul(rng: &mut Rng8) -> Outcome {
    let cases = 1000;
    let mut nonzero_brackets = 0;
    for case in 0..cases {
        let k = rng.gen_range(0..=1);
        let (ctx, pairs) = random_darboux_context(rng, k);
        let vars = all_vars(&ctx);
        let parity: [u8; 3] = [rng.gen_range(0..=1), rng.gen_range(0..=1), rng.gen_range(0..=1)];
        let [f, g, h] = parity.map(|p| random_poly(rng, &ctx, &vars, 4, 3, |q, _| q == p));
        let (pf, pg) = (parity[0] as i64, parity[1] as i64);
        let fail = |what: &str| Outcome { pass: false, detail: format!("case {case}: {what}") };

        if &(&f * &g) - &(&g * &f).scale(&sign(pf * pg)) != SuperPoly::zero(&ctx) {
            return fail("supercommutativity");
        }
        let v = *vars.choose(rng).unwrap();
        let pv = ctx.is_odd(v) as i64;
        let lhs = (&f * &g).left_derive(v);
        let rhs = &(&f.left_derive(v) * &g) + &(&f * &g.left_derive(v)).scale(&sign(pv * pf));
        if !(&lhs - &rhs).is_zero() {
            return fail("left Leibniz");
        }
        let lhs = (&f * &g).right_derive(v);
        let rhs = &(&f * &g.right_derive(v)) + &(&f.right_derive(v) * &g).scale(&sign(pv * pg));
        if !(&lhs - &rhs).is_zero() {
            return fail("right Leibniz");
        }

        let poisson = GradedPoisson::darboux(&ctx, k, &pairs).unwrap();
        let br = |a: &SuperPoly, b: &SuperPoly| poisson.bracket(a, b).unwrap();
        if br(&f, &g) != darboux_oracle(&ctx, k, &pairs, &f, &g) {
            return fail("bracket differs from the term-by-term formula");
        }
        if !br(&f, &g).is_zero() {
            nonzero_brackets += 1;
        }
        let kk = k as i64;
        let jac = &(&br(&f, &br(&g, &h)) - &br(&br(&f, &g), &h)) - &br(&g, &br(&f, &h)).scale(&sign((pf + kk) * (pg + kk)));
        if !jac.is_zero() {
            return fail("bracket Jacobi");
        }
        let leib = &(&br(&f, &(&g * &h)) - &(&br(&f, &g) * &h)) - &(&g * &br(&f, &h)).scale(&sign((pf + kk) * pg));
        if !leib.is_zero() {
            return fail("bracket Leibniz");
        }

        let degs: [i32; 3] = [rng.gen_range(-1..=1), rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
        let [x, y, z] = degs.map(|d| random_field(rng, &ctx, d));
        let (px, py) = (degs[0].rem_euclid(2) as i64, degs[1].rem_euclid(2) as i64);
        let b = |a: &VectorField, c: &VectorField| a.bracket(c).unwrap();
        let lhs = b(&x, &b(&y, &z));
        let rhs = b(&b(&x, &y), &z).add(&b(&y, &b(&x, &z)).scale(&sign(px * py))).unwrap();
        if lhs != rhs {
            return fail("vector field Jacobi");
        }
        let xy = b(&x, &y).apply(&f).unwrap();
        let commutator = &x.apply(&y.apply(&f).unwrap()).unwrap() - &y.apply(&x.apply(&f).unwrap()).unwrap().scale(&sign(px * py));
        if xy != commutator {
            return fail("vector field bracket is not the graded commutator");
        }
    }
    Outcome { pass: true, detail: format!("{cases} cases, {nonzero_brackets} with nonzero {{f,g}}") }
}

// ---------------------------------------------------------------- 2

type Blocks = [Vec<Vec<SuperPoly>>; 4];

fn random_blocks(rng: &mut Rng8, ctx: &Context, p: usize, q: usize) -> Blocks {
    let vars = all_vars(ctx);
    // a nonzero body plus nilpotent even terms
    let even = |rng: &mut Rng8, body: i64| {
        let soul = random_poly(rng, ctx, &vars, 2, 2, |par, _| par == 0);
        let nilpotent = soul
            .terms()
            .filter(|(m, _)| !m.is_one())
            .fold(SuperPoly::zero(ctx), |acc, (m, c)| &acc + &SuperPoly::term(ctx, m.clone(), c.clone()));
        &SuperPoly::int(ctx, body) + &nilpotent
    };
    let odd = |rng: &mut Rng8| random_poly(rng, ctx, &vars, 2, 3, |par, _| par == 1);
    // bodies: an integer matrix with nonzero determinant for A, a nonzero scalar for D
    let bodies: Vec<Vec<i64>> = loop {
        let m: Vec<Vec<i64>> = (0..p).map(|_| (0..p).map(|_| rng.gen_range(-2..=3)).collect()).collect();
        let det = if p == 1 { m[0][0] } else { m[0][0] * m[1][1] - m[0][1] * m[1][0] };
        if det != 0 {
            break m;
        }
    };
    let a = (0..p).map(|i| (0..p).map(|j| even(rng, bodies[i][j])).collect()).collect();
    let b = (0..p).map(|_| (0..q).map(|_| odd(rng)).collect()).collect();
    let c = (0..q).map(|_| (0..p).map(|_| odd(rng)).collect()).collect();
    let d = (0..q)
        .map(|_| {
            (0..q)
                .map(|_| {
                    let body = *[-2i64, -1, 1, 2, 3].choose(rng).unwrap();
                    even(rng, body)
                })
                .collect()
        })
        .collect();
    [a, b, c, d]
}

fn sub_blocks(x: &[Vec<SuperPoly>], y: &[Vec<SuperPoly>]) -> Vec<Vec<SuperPoly>> {
    x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect()).collect()
}

/// det(A) / det(D − C A⁻¹ B): the other Schur complement.
fn berezinian_via_a(ctx: &Context, blocks: &Blocks, p: usize) -> SuperPoly {
    let [a, b, c, d] = blocks;
    let ainv = inverse_even(ctx, a).unwrap();
    let cab = mat_mul(ctx, &mat_mul(ctx, c, &ainv, p), b, p);
    let schur = sub_blocks(d, &cab);
    &det_even(ctx, a) * &unit_inverse(&det_even(ctx, &schur)).unwrap()
}

fn berezinian_multiplicative(rng: &mut Rng8) -> Outcome {
    let mut checked = 0;
    for case in 0..200 {
        let n_odd = rng.gen_range(2..=4);
        let gens: Vec<Generator> = (0..n_odd).map(|i| Generator::new(format!("th{i}"), if i % 2 == 0 { 1 } else { -1 })).collect();
        let ctx = Context::new("ber", gens).unwrap();
        let (p, q) = if case % 2 == 0 { (1, 1) } else { (2, 1) };
        let bx = random_blocks(rng, &ctx, p, q);
        let by = random_blocks(rng, &ctx, p, q);
        let mk = |b: &Blocks| SuperMatrix::new(&ctx, p, q, b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone()).unwrap();
        let (x, y) = (mk(&bx), mk(&by));
        if !x.is_invertible() || !y.is_invertible() {
            return Outcome { pass: false, detail: format!("case {case}: generated matrix not invertible") };
        }
        let (ok, residual) = check_multiplicative(&x, &y).unwrap();
        if !ok {
            return Outcome { pass: false, detail: format!("case {case} ({p},{q}): residual {residual}") };
        }
        if x.berezinian().unwrap() != berezinian_via_a(&ctx, &bx, p) {
            return Outcome { pass: false, detail: format!("case {case}: the two Schur-complement formulas disagree") };
        }
        checked += 1;
    }
    Outcome { pass: true, detail: format!("{checked} pairs, orders (1,1) and (2,1)") }
}

// ---------------------------------------------------------------- 3

fn random_bv_space(rng: &mut Rng8, max_pairs: usize, tag: &str) -> BVSpace {
    let n = rng.gen_range(1..=max_pairs);
    let names: Vec<(String, i32, String)> =
        (0..n).map(|i| (format!("{tag}{i}"), rng.gen_range(-2..=1), format!("{tag}{i}s"))).collect();
    let fields: Vec<(&str, i32, &str)> = names.iter().map(|(q, g, p)| (q.as_str(), *g, p.as_str())).collect();
    BVSpace::build("bv", &fields, &[]).unwrap()
}

fn oracle_laplacian(space: &BVSpace, f: &SuperPoly) -> SuperPoly {
    let ctx = space.context();
    let mut out = SuperPoly::zero(ctx);
    for &(q, p) in space.pairs() {
        out = &out + &f.left_derive(p).left_derive(q).scale(&sign(ctx.is_odd(q) as i64));
    }
    out
}

fn bv_identities(rng: &mut Rng8) -> Outcome {
    let cases = 500;
    let mut nontrivial = 0;
    for case in 0..cases {
        let space = random_bv_space(rng, 4, "z");
        let ctx = space.context().clone();
        let vars = all_vars(&ctx);
        let pf: u8 = rng.gen_range(0..=1);
        let f = random_poly(rng, &ctx, &vars, 5, 4, |p, _| p == pf);
        let g = random_poly(rng, &ctx, &vars, 5, 4, |_, _| true);
        let fail = |what: &str| Outcome { pass: false, detail: format!("case {case}: {what}") };
        let lap = |h: &SuperPoly| space.laplacian(h).unwrap();
        if lap(&f) != oracle_laplacian(&space, &f) {
            return fail("Δ differs from Σ(−1)^|q| ∂_q∂_p");
        }
        if !lap(&lap(&f)).is_zero() || !lap(&lap(&g)).is_zero() {
            return fail("Δ² ≠ 0");
        }
        if !lap(&f).is_zero() {
            nontrivial += 1;
        }
        let pairs = space.pairs().to_vec();
        let anti = |a: &SuperPoly, b: &SuperPoly| darboux_oracle(&ctx, 1, &pairs, a, b);
        if space.antibracket(&f, &g).unwrap() != anti(&f, &g) {
            return fail("antibracket differs from the Darboux formula");
        }
        let s = sign(pf as i64);
        let rhs = &(&(&lap(&f) * &g) + &(&f * &lap(&g)).scale(&s)) + &anti(&f, &g).scale(&s);
        if lap(&(&f * &g)) != rhs {
            return fail("Δ(fg) ≠ Δf·g + (−1)^|f| fΔg + (−1)^|f| (f,g)");
        }
        // Δ is a derivation of the antibracket
        let lhs = lap(&anti(&f, &g));
        let rhs = &anti(&lap(&f), &g) - &anti(&f, &lap(&g)).scale(&sign(pf as i64));
        if lhs != rhs {
            return fail("Δ(f,g) ≠ (Δf,g) − (−1)^|f| (f,Δg)");
        }
    }
    Outcome { pass: true, detail: format!("{cases} pairs, {nontrivial} with Δf ≠ 0") }
}

// ---------------------------------------------------------------- 4

fn random_fermion(rng: &mut Rng8, space: &BVSpace) -> GaugeFermion {
    let ctx = space.context();
    let q = space.q_vars();
    loop {
        let psi = random_poly(rng, ctx, &q, 3, 3, |p, gh| p == 1 && gh == -1);
        if !psi.is_zero() {
            return GaugeFermion::new(space, psi).unwrap();
        }
    }
}

fn positive_covariance(rng: &mut Rng8) -> Matrix {
    loop {
        let (a, b, c) = (rng.gen_range(1..=3), rng.gen_range(-1..=1), rng.gen_range(1..=3));
        if a * c - b * b > 0 {
            return Matrix::from_i64(&[vec![a, b], vec![b, c]]);
        }
    }
}

/// Monomials in the fields with no complete (q, p) pair and no antifield of a
/// weighted pair (indices into `pairs()`): these are Δ_μ-closed term by term.
fn closed_part(rng: &mut Rng8, space: &BVSpace, weighted: &[usize], terms: usize) -> SuperPoly {
    let ctx = space.context();
    let vars: Vec<usize> = space
        .pairs()
        .iter()
        .enumerate()
        .flat_map(|(k, &(q, p))| if weighted.contains(&k) { vec![q] } else { vec![q, p] })
        .collect();
    let raw = random_poly(rng, ctx, &vars, terms, 3, |_, _| true);
    let mut out = SuperPoly::zero(ctx);
    for (m, c) in raw.terms() {
        if space.pairs().iter().all(|&(q, p)| m.exp(q) == 0 || m.exp(p) == 0) {
            out = &out + &SuperPoly::term(ctx, m.clone(), c.clone());
        }
    }
    out
}

fn bv_theorem(rng: &mut Rng8) -> Outcome {
    let odd_space =
        BVSpace::build("sa", &[("t1", -1, "p1"), ("t2", -1, "p2"), ("c", 1, "cs")], &[("a1", 0), ("a2", 0), ("a3", 0)])
            .unwrap();
    let gauss_space =
        BVSpace::build("sb", &[("x", 0, "xs"), ("y", 0, "ys"), ("t", -1, "pt")], &[("a1", 0), ("a2", 0), ("a3", 0)])
            .unwrap();
    let mut gaussian_cases = 0;
    let mut exact_nonzero = 0;
    for case in 0..100 {
        let gaussian = case % 4 == 0;
        let (space, w) = if gaussian {
            let ctx = gauss_space.context();
            let w = GaussianWeight::by_names(ctx, &["x", "y"], positive_covariance(rng)).unwrap();
            (&gauss_space, Some(w))
        } else {
            (&odd_space, None)
        };
        let fields: Vec<usize> = space.pairs().iter().flat_map(|&(q, p)| [q, p]).collect();
        let g = random_poly(rng, space.context(), &fields, 5, 4, |_, _| true);
        let family: Vec<GaugeFermion> = (0..5).map(|_| random_fermion(rng, space)).collect();
        let r = check_thm_bv1(&g, &family, space, w.as_ref()).unwrap();
        if !r.pass {
            return Outcome {
                pass: false,
                detail: format!("exactness case {case}: [{}]", r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
            };
        }
        gaussian_cases += gaussian as usize;
        let dg = bvkit::gauge::weighted_laplacian(space, w.as_ref(), &g).unwrap();
        exact_nonzero += !dg.is_zero() as usize;
    }
    let mut nonzero_values = 0;
    for case in 0..50 {
        let gaussian = case % 2 == 0;
        let (space, w, weighted, symbolic) = if gaussian {
            let ctx = gauss_space.context();
            let w = GaussianWeight::by_names(ctx, &["x", "y"], positive_covariance(rng)).unwrap();
            let v = |n: &str| SuperPoly::var(ctx, n).unwrap();
            let psi = &v("t") * &(&(&v("a1") + &(&v("a2") * &v("x"))) + &(&v("a3") * &v("y")));
            (&gauss_space, Some(w), vec![0usize, 1], psi)
        } else {
            let ctx = odd_space.context();
            let v = |n: &str| SuperPoly::var(ctx, n).unwrap();
            let psi = &(&(&v("a1") * &v("t1")) + &(&v("a2") * &v("t2"))) + &(&(&v("a3") * &v("t1")) * &(&v("t2") * &v("c")));
            (&odd_space, None, vec![], psi)
        };
        let ctx = space.context();
        let fields: Vec<usize> = space.pairs().iter().flat_map(|&(q, p)| [q, p]).collect();
        let h = random_poly(rng, ctx, &fields, 4, 4, |_, _| true);
        let f = &closed_part(rng, space, &weighted, 5) + &bvkit::gauge::weighted_laplacian(space, w.as_ref(), &h).unwrap();
        let family = vec![GaugeFermion::new(space, symbolic).unwrap(), random_fermion(rng, space), random_fermion(rng, space)];
        let params: Vec<usize> = ["a1", "a2", "a3"].iter().map(|n| ctx.index_of(n).unwrap()).collect();
        let r = check_thm_bv2(&f, &family, &params, space, w.as_ref()).unwrap();
        if !r.pass {
            return Outcome {
                pass: false,
                detail: format!(
                    "independence case {case}: hypothesis {} values [{}] depends on {:?}",
                    r.hypothesis,
                    r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
                    r.dependent_parameters
                ),
            };
        }
        gaussian_cases += gaussian as usize;
        nonzero_values += !r.values[0].is_zero() as usize;
    }
    let pass = gaussian_cases >= 20;
    Outcome {
        pass,
        detail: format!(
            "100 exact ({exact_nonzero} with Δg ≠ 0) + 50 closed ({nonzero_values} nonzero integrals), {gaussian_cases} Gaussian"
        ),
    }
}

// ---------------------------------------------------------------- 5

fn pushforward_chain_map(rng: &mut Rng8) -> Outcome {
    let weighted = BVSpace::build("pw", &[("y", 0, "ys"), ("s", -1, "ps"), ("x", 0, "xs"), ("t", -1, "pt")], &[]).unwrap();
    let odd = BVSpace::build("po", &[("y", 0, "ys"), ("s", 1, "ss"), ("t1", -1, "p1"), ("t2", -1, "p2")], &[]).unwrap();
    let mut nonzero = 0;
    for case in 0..200 {
        let gaussian = case % 2 == 0;
        let space = if gaussian { &weighted } else { &odd };
        let ctx = space.context();
        let split = FiberSplit::new(space, vec![2, 3]).unwrap();
        let w = gaussian.then(|| GaussianWeight::by_names(ctx, &["x"], Matrix::from_i64(&[vec![rng.gen_range(1..=3)]])).unwrap());
        let fiber_q: Vec<usize> = [2, 3].iter().map(|&k| space.pairs()[k].0).collect();
        let psi = loop {
            let p = random_poly(rng, ctx, &fiber_q, 3, 3, |par, gh| par == 1 && gh == -1);
            if !p.is_zero() {
                break GaugeFermion::new(space, p).unwrap();
            }
        };
        let f = random_poly(rng, ctx, &all_vars(ctx), 6, 4, |_, _| true);
        let r = chain_map_residual(&f, &psi, &split, w.as_ref()).unwrap();
        if !r.is_zero() {
            return Outcome { pass: false, detail: format!("case {case}: residual {r}") };
        }
        nonzero += !bv_pushforward(&f, &psi, &split, w.as_ref()).unwrap().is_zero() as usize;
    }
    Outcome { pass: true, detail: format!("200 inputs, {nonzero} with nonzero pushforward") }
}

// ---------------------------------------------------------------- 6

fn cotangent(n: usize) -> (Context, GradedPoisson) {
    let mut gens: Vec<Generator> = (1..=n).map(|i| Generator::new(format!("x{i}"), 0)).collect();
    gens.extend((1..=n).map(|i| Generator::new(format!("p{i}"), 0)));
    let ctx = Context::new("T*R", gens).unwrap();
    let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, n + i)).collect();
    let p = GradedPoisson::darboux(&ctx, 0, &pairs).unwrap();
    (ctx, p)
}

/// {S, S} for a BFV action, expanded with the term-by-term Darboux formula
/// over the base pairs and the ghost pairs.
fn full_master(data: &bvkit::bfv::BFVData, base_pairs: usize) -> SuperPoly {
    let ctx = data.context();
    let mut pairs: Vec<(usize, usize)> = (0..base_pairs).map(|i| (i, base_pairs + i)).collect();
    pairs.extend(data.ghosts().iter().copied());
    darboux_oracle(ctx, 0, &pairs, data.action(), data.action())
}

fn bfv_checks() -> Outcome {
    let mut notes = Vec::new();
    let (ctx, base) = cotangent(3);
    let v = |n: &str| SuperPoly::var(&ctx, n).unwrap();
    let l = |a: &str, b: &str, pa: &str, pb: &str| &(&v(a) * &v(pb)) - &(&v(b) * &v(pa));
    let ls = vec![l("x2", "x3", "p2", "p3"), l("x3", "x1", "p3", "p1"), l("x1", "x2", "p1", "p2")];
    let cs = ConstraintSystem::new(base, ls, None).unwrap();
    let so3 = ghost_extend(&cs).unwrap();
    let so3_ok = cs.has_constant_structure() && so3.master().unwrap().is_zero() && full_master(&so3, 3).is_zero();
    notes.push(format!("so(3) {}", if so3_ok { "ok" } else { "FAILED" }));

    let (ctx, base) = cotangent(1);
    let cs = ConstraintSystem::new(base, vec![SuperPoly::var(&ctx, "p1").unwrap()], None).unwrap();
    let data = ghost_extend(&cs).unwrap();
    let mut tstar_ok = true;
    for cutoff in 2..=4 {
        let h0 = data.q_cohomology_degree0(cutoff).unwrap().dimension;
        let direct = n_mod_i_dimension(&cs, cutoff);
        tstar_ok &= h0 == 1 && direct == Some(1);
    }
    notes.push(format!("T*R {}", if tstar_ok { "ok" } else { "FAILED" }));

    let (ctx, base) = cotangent(2);
    let v = |n: &str| SuperPoly::var(&ctx, n).unwrap();
    let phis = vec![&v("x1").pow(2) * &v("p1"), &v("x1") * &v("p2")];
    let cs = ConstraintSystem::new(base, phis, None).unwrap();
    let leading = ghost_extend(&cs).unwrap();
    let solved = leading.correct_order_by_order(2, 3).unwrap();
    let general_ok = !cs.has_constant_structure()
        && !leading.master().unwrap().is_zero()
        && solved.certified_b_degree() == Some(2)
        && solved.master().unwrap().is_zero()
        && full_master(&solved, 2).is_zero();
    notes.push(format!("x²p₁, x p₂ {}", if general_ok { "ok" } else { "FAILED" }));
    Outcome { pass: so3_ok && tstar_ok && general_ok, detail: notes.join(", ") }
}

// ---------------------------------------------------------------- 7

/// Rank of the incidence matrix over GF(p); incidence matrices are totally
/// unimodular, so this is the rational rank.
fn incidence_rank(nv: usize, edges: &[(usize, usize)]) -> usize {
    const P: i64 = 1_000_003;
    let mut rows: Vec<Vec<i64>> = edges
        .iter()
        .map(|&(a, b)| {
            let mut r = vec![0i64; nv];
            if a != b {
                r[a] = 1;
                r[b] = P - 1;
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..nv {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = modpow(rows[rank][col], P - 2, P);
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col] * inv % P;
                for j in 0..nv {
                    rows[i][j] = (rows[i][j] - f * rows[rank][j]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn modpow(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn combinatorics(rng: &mut Rng8) -> Outcome {
    for n in 2..=10usize {
        let got = codim1_strata_closed(n).len();
        if got != (1 << n) - n - 1 {
            return Outcome { pass: false, detail: format!("n = {n}: {got} strata") };
        }
    }
    let mut classes = 0;
    for total in 1..=4usize {
        for m in 0..=total {
            let n = total - m;
            for bits in 0..8u8 {
                let flags = GraphFlags { oriented: bits & 1 != 0, loops: bits & 2 != 0, multi: bits & 4 != 0 };
                let canon = enumerate_graphs(n, m, 4, flags).unwrap();
                let labeled = enumerate_labeled(n, m, 4, flags).unwrap();
                let from_labeled: std::collections::BTreeSet<FeynmanGraph> = labeled.iter().map(|g| g.canonical()).collect();
                let listed: std::collections::BTreeSet<FeynmanGraph> = canon.iter().cloned().collect();
                let group: usize = (1..=n).product::<usize>() * (1..=m).product::<usize>();
                let orbit_sum: usize = canon.iter().map(|g| group / g.automorphism_count()).sum();
                if from_labeled != listed || listed.len() != canon.len() || orbit_sum != labeled.len() {
                    return Outcome { pass: false, detail: format!("n={n} m={m} flags {flags:?}") };
                }
                classes += canon.len();
            }
        }
    }
    for case in 0..100 {
        let nv = rng.gen_range(1..=7usize);
        let m = rng.gen_range(0..=nv);
        let flags = GraphFlags { oriented: rng.gen(), loops: true, multi: true };
        let ne = rng.gen_range(0..=10);
        let edges: Vec<(usize, usize)> = (0..ne).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))).collect();
        let g = FeynmanGraph::new(nv - m, m, edges.clone(), flags).unwrap();
        let cycle_rank = edges.len() - incidence_rank(nv, &edges);
        if loop_number(&g) != cycle_rank {
            return Outcome { pass: false, detail: format!("random graph {case}: {edges:?}") };
        }
    }
    Outcome { pass: true, detail: format!("strata n=2..10, {classes} classes checked, 100 loop numbers") }
}

// ---------------------------------------------------------------- 8

fn state(cx: &ChainComplexModel) -> DiscreteState {
    let bf = build_bf(cx).unwrap();
    effective_action(&bf, &chain_contraction(cx).unwrap()).unwrap()
}

fn discrete_bf() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, cx) in [("interval", interval()), ("circle", circle(3)), ("disk", disk())] {
        let bf = build_bf(&cx).unwrap();
        let cme = !cx.is_closed() || bf.check_cme().unwrap().pass;
        let loc = bf.relaxed_check().unwrap();
        let omega_sq = bf.omega0().unwrap().square_witness(3).unwrap().is_none();
        let bulk = bf.check_mqme().unwrap();
        let st = state(&cx);
        let eff = st.check_mqme().unwrap();
        let ok = cme
            && loc.boundary_supported
            && omega_sq
            && bulk.pass
            && bulk.residuals.is_empty()
            && !bulk.truncated
            && eff.pass
            && !eff.truncated;
        pass &= ok;
        notes.push(format!("{name} {}", if ok { "ok" } else { "FAILED" }));
    }
    let st = state(&disk());
    let bad = st.corrupted("beta0").unwrap().check_mqme().unwrap();
    let control = !bad.pass && !bad.prefactor.is_zero();
    notes.push(format!("control prefactor {}", bad.prefactor));
    Outcome { pass: pass && control, detail: notes.join(", ") }
}

// ---------------------------------------------------------------- 9

fn gluing() -> Outcome {
    let (ia, ib) = (state(&interval()), state(&dual_interval()));
    let glued = glue(&ia, &ib, &[Match::new("v0", "v0", 1), Match::new("v1", "v1", -1)]).unwrap();
    let circle_ok = states_equivalent(&glued, &state(&circle(2))).unwrap().equivalent;

    let c = state(&collar());
    let m = [Match::new("f1", "v0", 1)];
    let left = glue(&glue(&c, &c, &m).unwrap(), &c, &[Match::new("2.f1", "v0", 1)]).unwrap();
    let right = glue(&c, &glue(&c, &c, &m).unwrap(), &[Match::new("f1", "1.v0", 1)]).unwrap();
    let assoc_ok = states_equivalent(&left, &right).unwrap().equivalent;

    let bf = build_bf(&annulus()).unwrap();
    let w: Vec<Q> = (0..6).map(|i| Q::from_integer((i % 3 + 1).into())).collect();
    let ch = contraction_change(&bf, &w).unwrap();
    let change_ok = !ch.difference.is_zero() && ch.primitive.as_ref().is_some_and(|p| !p.is_zero()) && ch.verified;
    Outcome {
        pass: circle_ok && assoc_ok && change_ok,
        detail: format!(
            "circle {circle_ok}, associative {assoc_ok}, exact change {change_ok} (primitive {})",
            ch.primitive.map(|p| p.to_string()).unwrap_or_default()
        ),
    }
}

// ---------------------------------------------------------------- 10

fn determinism() -> Outcome {
    let suite = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden/cases").display().to_string();
    let go = |threads: &str| bvkit_cli::run(&["verify-all".into(), suite.clone(), "--threads".into(), threads.into()], None);
    let a = go("1");
    let b = go("1");
    let c = go("4");
    let pass = a.code == 0 && a.stdout == b.stdout && a.stdout == c.stdout;
    Outcome { pass, detail: format!("{} bytes, exit {}", a.stdout.len(), a.code) }
}

#[test]
fn acceptance_criteria() {
    let mut rng = Rng8::seed_from_u64(0x5eed);
    let mut results = Vec::new();
    let secs = |s| Some(Duration::from_secs(s));

    let t = Instant::now();
    results.push(finish(1, "Koszul coherence", t, secs(30), koszul(&mut rng)));
    let t = Instant::now();
    results.push(finish(2, "Berezinian multiplicativity", t, secs(60), berezinian_multiplicative(&mut rng)));
    let t = Instant::now();
    results.push(finish(3, "BV operator identities", t, secs(60), bv_identities(&mut rng)));
    let t = Instant::now();
    results.push(finish(4, "BV theorem", t, secs(120), bv_theorem(&mut rng)));
    let t = Instant::now();
    results.push(finish(5, "pushforward chain map", t, None, pushforward_chain_map(&mut rng)));
    let t = Instant::now();
    results.push(finish(6, "BFV", t, None, bfv_checks()));
    let t = Instant::now();
    results.push(finish(7, "combinatorics", t, None, combinatorics(&mut rng)));
    let t = Instant::now();
    results.push(finish(8, "discrete BF", t, secs(120), discrete_bf()));
    let t = Instant::now();
    results.push(finish(9, "gluing", t, None, gluing()));
    let t = Instant::now();
    results.push(finish(10, "determinism", t, None, determinism()));

    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
