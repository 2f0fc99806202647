//! BV data of the discrete BF action, its boundary BFV data and the mQME.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{a_name, b_name, Cell, ChainComplexModel, ModelError, BOUNDARY_SIGN_A, BOUNDARY_SIGN_B};
use crate::algebra::{sign, Context, Generator, SuperPoly};
use crate::bv::{relaxed_check_forms, BVSpace, CmeReport, GradedPoisson};
use crate::cartan::{is_cohomological, FormSpace, VectorField};
use crate::linalg::{Matrix, Q};
use crate::polyspace::monomials;
use crate::scalar::{Gauss, Scalar, Window};

fn rational(q: &Q) -> Scalar {
    Scalar::from_rational(q.clone())
}

/// The boundary subcomplexes: A-fixed cells with their coboundary and B-fixed
/// cells with the transposed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComplex {
    pub a_cells: Vec<Cell>,
    pub b_cells: Vec<Cell>,
    /// (dA)_τ = Σ_σ d_aa[τ][σ] A_σ over A-fixed cells.
    pub d_aa: Matrix,
    /// (Bd)_σ = Σ_τ B_τ d_bb[τ][σ] over B-fixed cells.
    pub d_bb: Matrix,
}

impl BoundaryComplex {
    pub fn from_model(cx: &ChainComplexModel) -> Self {
        let a: Vec<usize> = cx.boundary_a().iter().copied().collect();
        let b: Vec<usize> = cx.boundary_b().iter().copied().collect();
        let block = |set: &[usize]| {
            let mut m = Matrix::zeros(set.len(), set.len());
            for (i, &t) in set.iter().enumerate() {
                for (j, &s) in set.iter().enumerate() {
                    m.set(i, j, cx.coboundary().get(t, s).clone());
                }
            }
            m
        };
        BoundaryComplex {
            a_cells: a.iter().map(|&c| cx.cells()[c].clone()).collect(),
            b_cells: b.iter().map(|&c| cx.cells()[c].clone()).collect(),
            d_aa: block(&a),
            d_bb: block(&b),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.a_cells.is_empty() && self.b_cells.is_empty()
    }

    /// (dA)_i in `ctx`, by variable name.
    pub fn differential_a(&self, ctx: &Context, i: usize) -> Result<SuperPoly, ModelError> {
        let mut out = SuperPoly::zero(ctx);
        for (j, c) in self.a_cells.iter().enumerate() {
            let v = self.d_aa.get(i, j);
            if !v.is_zero() {
                out = &out + &SuperPoly::var(ctx, &a_name(&c.name))?.scale(&rational(v));
            }
        }
        Ok(out)
    }

    /// (Bd)_i in `ctx`, with B on the left.
    pub fn differential_b(&self, ctx: &Context, i: usize) -> Result<SuperPoly, ModelError> {
        let mut out = SuperPoly::zero(ctx);
        for (t, c) in self.b_cells.iter().enumerate() {
            let v = self.d_bb.get(t, i);
            if !v.is_zero() {
                out = &out + &SuperPoly::var(ctx, &b_name(&c.name))?.scale(&rational(v));
            }
        }
        Ok(out)
    }

    /// Base variables with the coefficients of their conjugate fibers in S∂.
    fn coefficients(&self, ctx: &Context) -> Result<Vec<(usize, SuperPoly)>, ModelError> {
        let mut out = Vec::new();
        for (i, c) in self.a_cells.iter().enumerate() {
            let coeff = self.differential_a(ctx, i)?.scale_int(BOUNDARY_SIGN_A);
            out.push((ctx.index_of(&a_name(&c.name))?, coeff));
        }
        for (i, c) in self.b_cells.iter().enumerate() {
            let coeff = self.differential_b(ctx, i)?.scale_int(BOUNDARY_SIGN_B);
            out.push((ctx.index_of(&b_name(&c.name))?, coeff));
        }
        Ok(out)
    }

    /// Ω₀ acting on polynomials of `ctx`, which must contain every base variable.
    pub fn operator(&self, ctx: &Context) -> Result<BoundaryOperator, ModelError> {
        let terms = self.coefficients(ctx)?.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(BoundaryOperator { ctx: ctx.clone(), terms })
    }

    pub fn base_generators(&self) -> Vec<Generator> {
        let mut g: Vec<Generator> =
            self.a_cells.iter().map(|c| Generator::new(a_name(&c.name), 1 - c.degree as i32)).collect();
        g.extend(self.b_cells.iter().map(|c| Generator::new(b_name(&c.name), c.degree as i32 - 2)));
        g
    }

    /// Boundary phase space: base variables and their conjugate fibers, with S∂.
    pub fn bfv(&self) -> Result<BoundaryBfv, ModelError> {
        let base = self.base_generators();
        let mut gens = base.clone();
        for g in &base {
            gens.push(Generator::new(format!("{}'", g.name), -g.gh));
        }
        let ctx = Context::new("boundary", gens)?;
        let n = base.len();
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, n + i)).collect();
        let poisson = GradedPoisson::darboux(&ctx, 0, &pairs)?;
        let mut action = SuperPoly::zero(&ctx);
        for (i, c) in self.coefficients(&ctx)? {
            action = &action + &(&c * &SuperPoly::gen(&ctx, n + i));
        }
        Ok(BoundaryBfv { ctx, poisson, action, base: n })
    }
}

/// S∂ on the boundary phase space, linear in the fibers.
#[derive(Clone, Debug)]
pub struct BoundaryBfv {
    ctx: Context,
    poisson: GradedPoisson,
    action: SuperPoly,
    base: usize,
}

impl BoundaryBfv {
    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn action(&self) -> &SuperPoly {
        &self.action
    }

    pub fn poisson(&self) -> &GradedPoisson {
        &self.poisson
    }

    /// {S∂, S∂}.
    pub fn master(&self) -> Result<SuperPoly, ModelError> {
        Ok(self.poisson.bracket(&self.action, &self.action)?)
    }

    /// Substitutes each fiber by ∂S/∂(its base variable) inside the bulk context.
    pub fn pullback(&self, bulk: &Context, s: &SuperPoly) -> Result<SuperPoly, ModelError> {
        let mut bindings = std::collections::HashMap::new();
        for i in 0..self.base {
            let v = bulk.index_of(&self.ctx.generator(i).name)?;
            bindings.insert(self.base + i, s.left_derive(v));
        }
        Ok(self.action.substitute_into(bulk, &bindings)?)
    }
}

/// A first-order operator Σ c_j(b)·(−iħ)∂_{b_j} with derivatives to the right.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    ctx: Context,
    terms: Vec<(usize, SuperPoly)>,
}

fn minus_i_hbar() -> Scalar {
    Scalar::from_gauss(-&Gauss::i(), 1)
}

impl BoundaryOperator {
    pub fn zero(ctx: &Context) -> Self {
        BoundaryOperator { ctx: ctx.clone(), terms: Vec::new() }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(usize, SuperPoly)] {
        &self.terms
    }

    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly, ModelError> {
        self.ctx.same_as(f.context())?;
        let mut out = SuperPoly::zero(&self.ctx);
        for (v, c) in &self.terms {
            let df = f.left_derive(*v);
            if !df.is_zero() {
                out = &out + &(c * &df);
            }
        }
        Ok(out.scale(&minus_i_hbar()))
    }

    /// Ω(F e^X) e^{−X}.
    fn apply_dressed(&self, f: &SuperPoly, x: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        for (v, c) in &self.terms {
            let df = dressed_derive(f, *v, x);
            if !df.is_zero() {
                out = &out + &(c * &df);
            }
        }
        out.scale(&minus_i_hbar())
    }

    /// Ω² on every monomial of degree ≤ `max_degree` in the base variables;
    /// returns the first nonzero image.
    pub fn square_witness(&self, max_degree: u32) -> Result<Option<(SuperPoly, SuperPoly)>, ModelError> {
        let vars: Vec<usize> = self.terms.iter().map(|t| t.0).collect();
        for m in monomials(&self.ctx, &vars, max_degree, None) {
            let f = SuperPoly::term(&self.ctx, m, Scalar::one());
            let r = self.apply(&self.apply(&f)?)?;
            if !r.is_zero() {
                return Ok(Some((f, r)));
            }
        }
        Ok(None)
    }
}

/// e^{−X} ∂_v (F e^X) for even X.
fn dressed_derive(f: &SuperPoly, v: usize, x: &SuperPoly) -> SuperPoly {
    let ctx = f.context();
    let dx = x.left_derive(v);
    let mut out = f.left_derive(v);
    if dx.is_zero() {
        return out;
    }
    let pv = ctx.is_odd(v) as i64;
    for (par, fp) in f.parity_components().iter().enumerate() {
        if !fp.is_zero() {
            out = &out + &(fp * &dx).scale(&sign(pv * par as i64));
        }
    }
    out
}

/// The polynomial P with (ħ²Δ + Ω)(F e^{(i/ħ)S}) = P e^{(i/ħ)S}.
pub fn dressed_operator(
    pairs: &[(usize, usize)],
    omega: &BoundaryOperator,
    s: &SuperPoly,
    f: &SuperPoly,
) -> Result<SuperPoly, ModelError> {
    let ctx = f.context();
    ctx.same_as(s.context())?;
    ctx.same_as(omega.context())?;
    let x = s.scale(&Scalar::from_gauss(Gauss::i(), -1));
    let mut lap = SuperPoly::zero(ctx);
    for &(q, p) in pairs {
        let t = dressed_derive(&dressed_derive(f, p, &x), q, &x);
        lap = if ctx.is_odd(q) { &lap - &t } else { &lap + &t };
    }
    Ok(&lap.scale(&Scalar::hbar_pow(2)) + &omega.apply_dressed(f, &x))
}

pub fn mqme_prefactor(
    pairs: &[(usize, usize)],
    omega: &BoundaryOperator,
    s: &SuperPoly,
) -> Result<MqmeReport, ModelError> {
    let p = dressed_operator(pairs, omega, s, &SuperPoly::one(s.context()))?;
    Ok(MqmeReport::from_prefactor(p))
}

/// The prefactor of (ħ²Δ + Ω)e^{(i/ħ)S}, split by ħ-order.
#[derive(Clone, Debug)]
pub struct MqmeReport {
    pub pass: bool,
    pub prefactor: SuperPoly,
    pub residuals: BTreeMap<i32, SuperPoly>,
    /// Monomials of the prefactor, rendered.
    pub offending: Vec<String>,
    pub truncated: bool,
}

impl MqmeReport {
    fn from_prefactor(p: SuperPoly) -> Self {
        let residuals = p.hbar_orders().into_iter().map(|k| (k, p.hbar_component(k))).collect();
        let ctx = p.context().clone();
        let offending = p.terms().map(|(m, c)| SuperPoly::term(&ctx, m.clone(), c.clone()).to_string()).collect();
        MqmeReport { pass: p.is_zero(), truncated: p.truncated(), residuals, offending, prefactor: p }
    }
}

/// Outcome of the relaxed BV checks on a complex with boundary.
#[derive(Clone, Debug)]
pub struct LocalityReport {
    pub alpha: SuperPoly,
    /// Generators z whose dz occurs in Čα.
    pub support: Vec<String>,
    pub boundary_supported: bool,
    /// ½ι_Qι_Qω equals the pulled-back S∂.
    pub half_iqiq_is_pullback: bool,
    /// The Euler recovery ι_Eι_QČω equals the pulled-back S∂.
    pub euler_is_pullback: bool,
    pub pullback: SuperPoly,
    /// Signs of the boundary components of Q on A- and B-fixed variables.
    pub q_signs: (i64, i64),
}

/// The BV space of fields on a complex and the action ⟨B, dA⟩.
#[derive(Clone, Debug)]
pub struct DiscreteBF {
    model: ChainComplexModel,
    space: BVSpace,
    action: SuperPoly,
    boundary: BoundaryComplex,
}

pub fn build_bf(cx: &ChainComplexModel) -> Result<DiscreteBF, ModelError> {
    build_bf_in(cx, Window::DEFAULT)
}

/// As [`build_bf`], with a chosen ħ truncation window for the field context.
pub fn build_bf_in(cx: &ChainComplexModel, window: Window) -> Result<DiscreteBF, ModelError> {
    let cells = cx.cells();
    let interior = cx.interior();
    let mut gens = Vec::new();
    for &c in &interior {
        let k = cells[c].degree as i32;
        gens.push(Generator::new(a_name(&cells[c].name), 1 - k));
        gens.push(Generator::new(b_name(&cells[c].name), k - 2));
    }
    let boundary = BoundaryComplex::from_model(cx);
    gens.extend(boundary.base_generators());
    let ctx = Context::with_window("bf", gens, window)?;
    let pairs = (0..interior.len()).map(|i| (2 * i, 2 * i + 1)).collect();
    let space = BVSpace::new(&ctx, pairs)?;
    let d = cx.coboundary();
    let mut action = SuperPoly::zero(&ctx);
    for (t, ct) in cells.iter().enumerate() {
        if cx.boundary_a().contains(&t) {
            continue;
        }
        for (s, cs) in cells.iter().enumerate() {
            let v = d.get(t, s);
            if v.is_zero() || cx.boundary_b().contains(&s) {
                continue;
            }
            let term = &SuperPoly::var(&ctx, &b_name(&ct.name))? * &SuperPoly::var(&ctx, &a_name(&cs.name))?;
            action = &action + &term.scale(&rational(v));
        }
    }
    Ok(DiscreteBF { model: cx.clone(), space, action, boundary })
}

impl DiscreteBF {
    pub fn model(&self) -> &ChainComplexModel {
        &self.model
    }

    pub fn space(&self) -> &BVSpace {
        &self.space
    }

    pub fn context(&self) -> &Context {
        self.space.context()
    }

    pub fn action(&self) -> &SuperPoly {
        &self.action
    }

    pub fn boundary(&self) -> &BoundaryComplex {
        &self.boundary
    }

    pub fn check_cme(&self) -> Result<CmeReport, ModelError> {
        Ok(self.space.check_cme(&self.action)?)
    }

    /// Q = (S, ·) on bulk fields, extended to base variables by the boundary
    /// differentials with the signs that make Q square to zero.
    pub fn q_field(&self) -> Result<(VectorField, (i64, i64)), ModelError> {
        let ctx = self.context();
        let bulk = self.space.hamiltonian_vf(&self.action)?;
        for sa in [1i64, -1] {
            for sb in [1i64, -1] {
                let mut comps = Vec::new();
                for (i, c) in self.boundary.a_cells.iter().enumerate() {
                    comps.push((ctx.index_of(&a_name(&c.name))?, self.boundary.differential_a(ctx, i)?.scale_int(sa)));
                }
                for (i, c) in self.boundary.b_cells.iter().enumerate() {
                    comps.push((ctx.index_of(&b_name(&c.name))?, self.boundary.differential_b(ctx, i)?.scale_int(sb)));
                }
                let q = bulk.add(&VectorField::new(ctx, 1, comps)?)?;
                if is_cohomological(&q)?.cohomological {
                    return Ok((q, (sa, sb)));
                }
            }
        }
        Err(ModelError::NoCohomologicalQ)
    }

    pub fn relaxed_check(&self) -> Result<LocalityReport, ModelError> {
        let ctx = self.context();
        let (q, q_signs) = self.q_field()?;
        let fs = FormSpace::new(ctx)?;
        let omega = self.space.symplectic_form(&fs)?;
        let pullback = self.boundary.bfv()?.pullback(ctx, &self.action)?;
        let report = relaxed_check_forms(&fs, &omega, &q, &self.action, Some(&pullback))?;
        let paired: Vec<usize> = self.space.pairs().iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut support = Vec::new();
        let mut boundary_supported = true;
        for z in 0..ctx.len() {
            if report.alpha.mentions(fs.d_index(z)) {
                support.push(ctx.generator(z).name.clone());
                if paired.contains(&z) {
                    boundary_supported = false;
                }
            }
        }
        let (half_iqiq_is_pullback, euler_is_pullback) = report.candidate.unwrap_or((false, false));
        Ok(LocalityReport {
            alpha: report.alpha,
            support,
            boundary_supported,
            half_iqiq_is_pullback,
            euler_is_pullback,
            pullback,
            q_signs,
        })
    }

    pub fn omega0(&self) -> Result<BoundaryOperator, ModelError> {
        self.boundary.operator(self.context())
    }

    /// (ħ²Δ + Ω₀)e^{(i/ħ)S} over all bulk fields.
    pub fn check_mqme(&self) -> Result<MqmeReport, ModelError> {
        mqme_prefactor(self.space.pairs(), &self.omega0()?, &self.action)
    }
}
