//! Graded vector fields and differential forms.
//!
//! Forms are polynomials on the doubled context that adjoins `d<z>` with
//! gh(dz) = gh(z) + 1 for every generator z.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{sign, AlgebraError, Context, Generator, SuperPoly};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("component for `{generator}` has ghost number {found:?}, expected {expected}")]
    ComponentDegree { generator: String, expected: i32, found: Option<i32> },
    #[error("vector field must be odd of degree +1, got degree {0}")]
    NotOddDegreeOne(i32),
    #[error("[Q,Q] ≠ 0: component `{generator}` is {residual}")]
    NotCohomological { generator: String, residual: String },
}

/// Σ_z X^z ∂_z, a graded derivation of ghost degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    ctx: Context,
    degree: i32,
    components: BTreeMap<usize, SuperPoly>,
}

impl VectorField {
    pub fn zero(ctx: &Context, degree: i32) -> Self {
        VectorField { ctx: ctx.clone(), degree, components: BTreeMap::new() }
    }

    /// Builds a field, checking gh(X^z) = gh(z) + degree for every nonzero component.
    pub fn new(
        ctx: &Context,
        degree: i32,
        components: impl IntoIterator<Item = (usize, SuperPoly)>,
    ) -> Result<Self, CartanError> {
        let mut out = VectorField::zero(ctx, degree);
        for (i, p) in components {
            ctx.same_as(p.context())?;
            if p.is_zero() {
                continue;
            }
            let g = ctx.generator(i);
            let expected = g.gh + degree;
            let comps = p.gh_components();
            if comps.len() != 1 || !comps.contains_key(&expected) {
                return Err(CartanError::ComponentDegree {
                    generator: g.name.clone(),
                    expected,
                    found: p.ghost_number(),
                });
            }
            let e = out.components.entry(i).or_insert_with(|| SuperPoly::zero(ctx));
            *e = &*e + &p;
        }
        out.components.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    pub fn named(
        ctx: &Context,
        degree: i32,
        components: &[(&str, SuperPoly)],
    ) -> Result<Self, CartanError> {
        let mut v = Vec::new();
        for (n, p) in components {
            v.push((ctx.index_of(n)?, p.clone()));
        }
        VectorField::new(ctx, degree, v)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn parity(&self) -> u8 {
        self.degree.rem_euclid(2) as u8
    }

    pub fn component(&self, i: usize) -> SuperPoly {
        self.components.get(&i).cloned().unwrap_or_else(|| SuperPoly::zero(&self.ctx))
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &SuperPoly)> {
        self.components.iter().map(|(i, p)| (*i, p))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly, CartanError> {
        self.ctx.same_as(f.context())?;
        let mut out = SuperPoly::zero(&self.ctx);
        for (i, c) in &self.components {
            let d = f.left_derive(*i);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> VectorField {
        VectorField {
            ctx: self.ctx.clone(),
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(i, p)| (*i, p.scale(s)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }

    pub fn add(&self, o: &VectorField) -> Result<VectorField, CartanError> {
        self.ctx.same_as(&o.ctx)?;
        let mut comps = self.components.clone();
        for (i, p) in &o.components {
            let e = comps.entry(*i).or_insert_with(|| SuperPoly::zero(&self.ctx));
            *e = &*e + p;
        }
        comps.retain(|_, p| !p.is_zero());
        Ok(VectorField { ctx: self.ctx.clone(), degree: self.degree, components: comps })
    }

    /// Graded commutator [X,Y] = X∘Y − (−1)^{|X||Y|} Y∘X.
    pub fn bracket(&self, o: &VectorField) -> Result<VectorField, CartanError> {
        self.ctx.same_as(&o.ctx)?;
        let s = sign((self.parity() * o.parity()) as i64);
        let mut comps = BTreeMap::new();
        for i in 0..self.ctx.len() {
            let a = self.apply(&o.component(i))?;
            let b = o.apply(&self.component(i))?;
            let c = &a - &b.scale(&s);
            if !c.is_zero() {
                comps.insert(i, c);
            }
        }
        Ok(VectorField { ctx: self.ctx.clone(), degree: self.degree + o.degree, components: comps })
    }
}

/// Result of a [Q,Q] = 0 test.
#[derive(Clone, Debug)]
pub struct CohomologicalCheck {
    pub cohomological: bool,
    /// First nonzero component of [Q,Q], by generator name.
    pub witness: Option<(String, SuperPoly)>,
}

pub fn is_cohomological(q: &VectorField) -> Result<CohomologicalCheck, CartanError> {
    if q.degree() != 1 {
        return Err(CartanError::NotOddDegreeOne(q.degree()));
    }
    let qq = q.bracket(q)?;
    let witness = qq
        .components()
        .next()
        .map(|(i, p)| (q.context().generator(i).name.clone(), p.clone()));
    Ok(CohomologicalCheck { cohomological: witness.is_none(), witness })
}

/// Q = ½ Σ x^i x^j f_{ij}^k ∂_{x^k} on odd generators `xs` (all gh 1).
/// `f[i][j][k]` are the structure constants.
pub fn chevalley_eilenberg(
    ctx: &Context,
    xs: &[usize],
    f: &[Vec<Vec<Scalar>>],
) -> Result<VectorField, CartanError> {
    let half = Scalar::from_ratio(1, 2);
    let mut comps: Vec<(usize, SuperPoly)> = Vec::new();
    for (k, &xk) in xs.iter().enumerate() {
        let mut c = SuperPoly::zero(ctx);
        for (i, &xi) in xs.iter().enumerate() {
            for (j, &xj) in xs.iter().enumerate() {
                let s = &f[i][j][k];
                if s.is_zero() {
                    continue;
                }
                let t = &SuperPoly::gen(ctx, xi) * &SuperPoly::gen(ctx, xj);
                c = &c + &t.scale(&(s * &half));
            }
        }
        comps.push((xk, c));
    }
    VectorField::new(ctx, 1, comps)
}

/// The doubled context carrying differential forms.
#[derive(Clone, Debug)]
pub struct FormSpace {
    base: Context,
    forms: Context,
}

impl FormSpace {
    pub fn new(base: &Context) -> Result<Self, CartanError> {
        let more: Vec<Generator> = base
            .generators()
            .iter()
            .map(|g| Generator::new(format!("d{}", g.name), g.gh + 1))
            .collect();
        let forms = base.extended(&format!("Ω({})", base.name()), more)?;
        Ok(FormSpace { base: base.clone(), forms })
    }

    pub fn base(&self) -> &Context {
        &self.base
    }

    pub fn context(&self) -> &Context {
        &self.forms
    }

    fn n(&self) -> usize {
        self.base.len()
    }

    /// Index of dz in the doubled context.
    pub fn d_index(&self, z: usize) -> usize {
        self.n() + z
    }

    pub fn dgen(&self, z: usize) -> SuperPoly {
        SuperPoly::gen(&self.forms, self.d_index(z))
    }

    /// A function on the base, seen as a 0-form.
    pub fn function(&self, f: &SuperPoly) -> Result<SuperPoly, CartanError> {
        self.base.same_as(f.context())?;
        Ok(f.lift(&self.forms)?)
    }

    /// Lifts a base vector field to the doubled context (no dz components).
    pub fn lift_field(&self, x: &VectorField) -> Result<VectorField, CartanError> {
        let comps: Vec<(usize, SuperPoly)> = x
            .components()
            .map(|(i, p)| Ok((i, self.function(p)?)))
            .collect::<Result<_, CartanError>>()?;
        VectorField::new(&self.forms, x.degree(), comps)
    }

    /// The de Rham differential Σ_z dz ∂_z as a field on the doubled context.
    pub fn de_rham_field(&self) -> VectorField {
        let comps: Vec<(usize, SuperPoly)> = (0..self.n()).map(|z| (z, self.dgen(z))).collect();
        VectorField::new(&self.forms, 1, comps).expect("dz has the right degree")
    }

    pub fn d(&self, w: &SuperPoly) -> Result<SuperPoly, CartanError> {
        self.forms.same_as(w.context())?;
        let mut out = SuperPoly::zero(&self.forms);
        for z in 0..self.n() {
            let dz = w.left_derive(z);
            if !dz.is_zero() {
                out = &out + &(&self.dgen(z) * &dz);
            }
        }
        Ok(out)
    }

    /// ι_X: the derivation sending dz ↦ X^z and z ↦ 0, of ghost degree deg(X) − 1.
    pub fn contract(&self, x: &VectorField, w: &SuperPoly) -> Result<SuperPoly, CartanError> {
        self.base.same_as(x.context())?;
        self.forms.same_as(w.context())?;
        let mut out = SuperPoly::zero(&self.forms);
        for (z, c) in x.components() {
            let dw = w.left_derive(self.d_index(z));
            if !dw.is_zero() {
                out = &out + &(&self.function(c)? * &dw);
            }
        }
        Ok(out)
    }

    /// L_X = [ι_X, d] = ι_X d − (−1)^{|X|+1} d ι_X.
    pub fn lie_derivative(&self, x: &VectorField, w: &SuperPoly) -> Result<SuperPoly, CartanError> {
        let a = self.contract(x, &self.d(w)?)?;
        let b = self.d(&self.contract(x, w)?)?;
        let s = sign(x.parity() as i64 + 1);
        Ok(&a - &b.scale(&s))
    }

    /// The sign s with [L_X, ι_Y] ω = s·ι_{[X,Y]} ω on the given form, if either sign fits.
    pub fn lie_contract_sign(
        &self,
        x: &VectorField,
        y: &VectorField,
        w: &SuperPoly,
    ) -> Result<Option<i64>, CartanError> {
        let py = (y.parity() + 1) % 2;
        let lx_iy = self.lie_derivative(x, &self.contract(y, w)?)?;
        let iy_lx = self.contract(y, &self.lie_derivative(x, w)?)?;
        let comm = &lx_iy - &iy_lx.scale(&sign((x.parity() * py) as i64));
        let target = self.contract(&x.bracket(y)?, w)?;
        if comm == target {
            Ok(Some(1))
        } else if comm == -&target {
            Ok(Some(-1))
        } else {
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn de_rham_examples() {
        let base = Context::from_pairs("b", &[("x", 0), ("t1", 1), ("t2", 1)]).unwrap();
        let fs = FormSpace::new(&base).unwrap();
        let x = fs.function(&SuperPoly::var(&base, "x").unwrap()).unwrap();
        assert_eq!(fs.d(&x).unwrap(), fs.dgen(0));
        let t1 = SuperPoly::var(&base, "t1").unwrap();
        let xt = fs.function(&(&SuperPoly::var(&base, "x").unwrap() * &t1)).unwrap();
        assert!(fs.d(&fs.d(&xt).unwrap()).unwrap().is_zero());
        assert!(is_cohomological(&fs.de_rham_field()).unwrap().cohomological);
    }

    #[test]
    fn bracket_of_translations() {
        let c = Context::from_pairs("c", &[("x", 0)]).unwrap();
        let x = SuperPoly::var(&c, "x").unwrap();
        let dx = VectorField::named(&c, 0, &[("x", SuperPoly::one(&c))]).unwrap();
        let xdx = VectorField::named(&c, 0, &[("x", x)]).unwrap();
        assert_eq!(dx.bracket(&xdx).unwrap(), dx);
    }

    #[test]
    fn rejects_wrong_component_degree() {
        let c = Context::from_pairs("c", &[("x", 0), ("t", 1)]).unwrap();
        let t = SuperPoly::var(&c, "t").unwrap();
        assert!(VectorField::named(&c, 0, &[("x", t)]).is_err());
    }
}
