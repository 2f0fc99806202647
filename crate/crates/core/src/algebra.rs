//! Supercommutative polynomials over an ordered, ℤ-graded generator context.
//!
//! Monomials are stored in normal form: factors in context order, odd
//! exponents in {0, 1}. Any Koszul sign produced while sorting lives in the
//! coefficient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{Scalar, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("context mismatch: `{left}` vs `{right}`")]
    ContextMismatch { left: String, right: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}` in context")]
    DuplicateGenerator(String),
    #[error("binding for `{generator}` has ghost number {found:?}, expected {expected}")]
    BindingMismatch { generator: String, expected: i32, found: Option<i32> },
    #[error("odd generator `{0}` given exponent {1}")]
    OddExponent(String, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub name: String,
    pub gh: i32,
}

impl Generator {
    pub fn new(name: impl Into<String>, gh: i32) -> Self {
        Generator { name: name.into(), gh }
    }

    /// 0 for even, 1 for odd.
    pub fn parity(&self) -> u8 {
        self.gh.rem_euclid(2) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }
}

#[derive(Debug)]
struct ContextData {
    name: String,
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
    odd: Vec<bool>,
    window: Window,
}

/// An ordered list of generators with unique names, shared by reference.
#[derive(Clone, Debug)]
pub struct Context(Arc<ContextData>);

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.gens == other.0.gens && self.0.window == other.0.window)
    }
}

impl Eq for Context {}

impl Context {
    pub fn new(name: impl Into<String>, gens: Vec<Generator>) -> Result<Self, AlgebraError> {
        Context::with_window(name, gens, Window::DEFAULT)
    }

    pub fn with_window(
        name: impl Into<String>,
        gens: Vec<Generator>,
        window: Window,
    ) -> Result<Self, AlgebraError> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        let odd = gens.iter().map(|g| g.is_odd()).collect();
        Ok(Context(Arc::new(ContextData { name: name.into(), gens, index, odd, window })))
    }

    /// Convenience constructor from (name, gh) pairs.
    pub fn from_pairs(name: &str, pairs: &[(&str, i32)]) -> Result<Self, AlgebraError> {
        Context::new(name, pairs.iter().map(|(n, g)| Generator::new(*n, *g)).collect())
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn window(&self) -> Window {
        self.0.window
    }

    pub fn len(&self) -> usize {
        self.0.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.0.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.0.index.get(name).copied().ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.index.contains_key(name)
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.0.odd[i]
    }

    /// A new context with `more` appended after the existing generators.
    pub fn extended(&self, name: &str, more: Vec<Generator>) -> Result<Context, AlgebraError> {
        let mut gens = self.0.gens.clone();
        gens.extend(more);
        Context::with_window(name, gens, self.0.window)
    }

    /// Same generators, different ħ window.
    pub fn with_new_window(&self, window: Window) -> Context {
        Context::with_window(self.0.name.clone(), self.0.gens.clone(), window)
            .expect("generators already validated")
    }

    pub fn same_as(&self, other: &Context) -> Result<(), AlgebraError> {
        if self == other {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch {
                left: self.0.name.clone(),
                right: other.0.name.clone(),
            })
        }
    }
}

/// Exponent vector in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0[i]
    }

    fn parity(&self, ctx: &Context) -> u8 {
        let mut p = 0u32;
        for (i, &e) in self.0.iter().enumerate() {
            if ctx.is_odd(i) {
                p += e;
            }
        }
        (p % 2) as u8
    }

    fn gh(&self, ctx: &Context) -> i32 {
        self.0.iter().enumerate().map(|(i, &e)| e as i32 * ctx.generator(i).gh).sum()
    }

    /// Normal-form product and its Koszul sign; None if an odd square appears.
    fn mul(&self, other: &Monomial, ctx: &Context) -> Option<(Monomial, bool)> {
        let n = self.0.len();
        let mut out = Vec::with_capacity(n);
        let mut odd_after = 0u32; // odd factors of self with index > current
        for i in 0..n {
            if ctx.is_odd(i) {
                odd_after += self.0[i];
            }
        }
        let mut swaps = 0u32;
        for i in 0..n {
            let a = self.0[i];
            let b = other.0[i];
            if ctx.is_odd(i) {
                odd_after -= a;
                if a + b > 1 {
                    return None;
                }
                if b == 1 {
                    swaps += odd_after;
                }
            }
            out.push(a + b);
        }
        Some((Monomial(out), swaps % 2 == 1))
    }
}

/// A polynomial in the supercommutative algebra of a context.
#[derive(Clone, Debug)]
pub struct SuperPoly {
    ctx: Context,
    terms: BTreeMap<Monomial, Scalar>,
    truncated: bool,
}

impl PartialEq for SuperPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl Eq for SuperPoly {}

impl SuperPoly {
    pub fn zero(ctx: &Context) -> Self {
        SuperPoly { ctx: ctx.clone(), terms: BTreeMap::new(), truncated: false }
    }

    pub fn constant(ctx: &Context, c: Scalar) -> Self {
        let mut p = SuperPoly::zero(ctx);
        p.add_term(Monomial::one(ctx.len()), c);
        p
    }

    pub fn one(ctx: &Context) -> Self {
        SuperPoly::constant(ctx, Scalar::one())
    }

    pub fn int(ctx: &Context, n: i64) -> Self {
        SuperPoly::constant(ctx, Scalar::from_int(n))
    }

    pub fn gen(ctx: &Context, i: usize) -> Self {
        let mut m = Monomial::one(ctx.len());
        m.0[i] = 1;
        SuperPoly::term(ctx, m, Scalar::one())
    }

    pub fn var(ctx: &Context, name: &str) -> Result<Self, AlgebraError> {
        Ok(SuperPoly::gen(ctx, ctx.index_of(name)?))
    }

    /// c·m for a monomial given in normal form; odd exponents ≥ 2 give zero.
    pub fn term(ctx: &Context, m: Monomial, c: Scalar) -> Self {
        let mut p = SuperPoly::zero(ctx);
        if (0..ctx.len()).any(|i| ctx.is_odd(i) && m.0[i] > 1) {
            return p;
        }
        p.add_term(m, c);
        p
    }

    /// Product of named generators in the given (not necessarily normal) order.
    pub fn product_of(ctx: &Context, names: &[(&str, u32)], c: Scalar) -> Result<Self, AlgebraError> {
        let mut acc = SuperPoly::constant(ctx, c);
        for (n, e) in names {
            let g = SuperPoly::var(ctx, n)?;
            for _ in 0..*e {
                acc = &acc * &g;
            }
        }
        Ok(acc)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self, t: bool) {
        self.truncated |= t;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Adds c·m, keeping only ħ-powers inside the context window.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let (c, dropped) = c.truncate(self.ctx.window());
        self.truncated |= dropped;
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = &*e + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = SuperPoly::zero(&self.ctx);
        out.truncated = self.truncated;
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Scalar::from_int(n))
    }

    pub fn try_add(&self, o: &SuperPoly) -> Result<SuperPoly, AlgebraError> {
        self.ctx.same_as(&o.ctx)?;
        let mut out = self.clone();
        out.truncated |= o.truncated;
        for (m, v) in &o.terms {
            out.add_term(m.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &SuperPoly) -> Result<SuperPoly, AlgebraError> {
        self.try_add(&-o)
    }

    pub fn try_mul(&self, o: &SuperPoly) -> Result<SuperPoly, AlgebraError> {
        self.ctx.same_as(&o.ctx)?;
        let mut out = SuperPoly::zero(&self.ctx);
        out.truncated = self.truncated || o.truncated;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                if let Some((m, neg)) = m1.mul(m2, &self.ctx) {
                    let c = c1 * c2;
                    out.add_term(m, if neg { -&c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> SuperPoly {
        let mut acc = SuperPoly::one(&self.ctx);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Parity of the element when homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.ctx));
        let first = it.next().unwrap_or(0);
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Ghost number when homogeneous; None for zero or mixed elements.
    pub fn ghost_number(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| m.gh(&self.ctx));
        let first = it.next()?;
        if it.all(|g| g == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Decomposition into components of fixed ghost number.
    pub fn gh_components(&self) -> BTreeMap<i32, SuperPoly> {
        let mut out: BTreeMap<i32, SuperPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.gh(&self.ctx))
                .or_insert_with(|| SuperPoly::zero(&self.ctx))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Decomposition into even (index 0) and odd (index 1) parts.
    pub fn parity_components(&self) -> [SuperPoly; 2] {
        let mut out = [SuperPoly::zero(&self.ctx), SuperPoly::zero(&self.ctx)];
        for (m, c) in &self.terms {
            out[m.parity(&self.ctx) as usize].add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn term_parity(&self, m: &Monomial) -> u8 {
        m.parity(&self.ctx)
    }

    pub fn term_gh(&self, m: &Monomial) -> i32 {
        m.gh(&self.ctx)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// The coefficient of ħ^k, as a polynomial with ħ-free coefficients.
    pub fn hbar_component(&self, k: i32) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let g = c.coeff(k);
            if !g.is_zero() {
                out.add_term(m.clone(), Scalar::from_gauss(g, 0));
            }
        }
        out
    }

    /// All ħ-powers that occur.
    pub fn hbar_orders(&self) -> Vec<i32> {
        let mut ks: Vec<i32> = self
            .terms
            .values()
            .flat_map(|c| c.terms().map(|(k, _)| k).collect::<Vec<_>>())
            .collect();
        ks.sort();
        ks.dedup();
        ks
    }

    /// Whether generator i occurs in some term.
    pub fn mentions(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    /// Left derivative ∂_v, a graded derivation of parity |v| and ghost degree −gh(v).
    pub fn left_derive(&self, v: usize) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        out.truncated = self.truncated;
        let odd = self.ctx.is_odd(v);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[v] -= 1;
            let coef = if odd {
                let before: u32 = (0..v).filter(|&j| self.ctx.is_odd(j)).map(|j| m.0[j]).sum();
                if before % 2 == 1 {
                    -c
                } else {
                    c.clone()
                }
            } else {
                c * &Scalar::from_int(e as i64)
            };
            out.add_term(nm, coef);
        }
        out
    }

    pub fn left_derive_by(&self, name: &str) -> Result<SuperPoly, AlgebraError> {
        Ok(self.left_derive(self.ctx.index_of(name)?))
    }

    /// Right derivative f←∂_v = (−1)^{|v|(|f|+1)} ∂_v f, applied per homogeneous term.
    pub fn right_derive(&self, v: usize) -> SuperPoly {
        if !self.ctx.is_odd(v) {
            return self.left_derive(v);
        }
        let [even, odd] = self.parity_components();
        // |f| even: sign −1; |f| odd: sign +1
        let a = even.left_derive(v);
        let b = odd.left_derive(v);
        &b - &a
    }

    pub fn right_derive_by(&self, name: &str) -> Result<SuperPoly, AlgebraError> {
        Ok(self.right_derive(self.ctx.index_of(name)?))
    }

    /// Algebra homomorphism sending bound generators to the given values.
    /// Unbound generators pass through unchanged.
    pub fn substitute(&self, bindings: &[(usize, SuperPoly)]) -> Result<SuperPoly, AlgebraError> {
        let ctx = self.ctx.clone();
        let map: HashMap<usize, SuperPoly> = bindings.iter().cloned().collect();
        self.substitute_into(&ctx, &map)
    }

    pub fn substitute_named(&self, bindings: &[(&str, SuperPoly)]) -> Result<SuperPoly, AlgebraError> {
        let mut b = Vec::new();
        for (n, p) in bindings {
            b.push((self.ctx.index_of(n)?, p.clone()));
        }
        self.substitute(&b)
    }

    /// Homomorphism into `target`: bound generators map to their values, the
    /// rest map to the generator of the same name in `target`.
    pub fn substitute_into(
        &self,
        target: &Context,
        bindings: &HashMap<usize, SuperPoly>,
    ) -> Result<SuperPoly, AlgebraError> {
        let n = self.ctx.len();
        let mut images: Vec<SuperPoly> = Vec::with_capacity(n);
        for i in 0..n {
            let g = self.ctx.generator(i);
            match bindings.get(&i) {
                Some(v) => {
                    target.same_as(&v.ctx)?;
                    if !v.is_zero() && v.ghost_number() != Some(g.gh) {
                        return Err(AlgebraError::BindingMismatch {
                            generator: g.name.clone(),
                            expected: g.gh,
                            found: v.ghost_number(),
                        });
                    }
                    images.push(v.clone());
                }
                None => {
                    let j = target.index_of(&g.name)?;
                    if target.generator(j).gh != g.gh {
                        return Err(AlgebraError::BindingMismatch {
                            generator: g.name.clone(),
                            expected: g.gh,
                            found: Some(target.generator(j).gh),
                        });
                    }
                    images.push(SuperPoly::gen(target, j));
                }
            }
        }
        let mut cache: HashMap<(usize, u32), SuperPoly> = HashMap::new();
        let mut out = SuperPoly::zero(target);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            let mut acc = SuperPoly::constant(target, c.clone());
            for i in 0..n {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                let p = cache.entry((i, e)).or_insert_with(|| images[i].pow(e)).clone();
                acc = &acc * &p;
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in a context containing all its generators (by name).
    pub fn lift(&self, target: &Context) -> Result<SuperPoly, AlgebraError> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        self.reexpress(target, false)
    }

    /// Projects onto another context by name, dropping every term that mentions a
    /// generator absent from `target`.
    pub fn project(&self, target: &Context) -> Result<SuperPoly, AlgebraError> {
        self.reexpress(target, true)
    }

    fn reexpress(&self, target: &Context, drop_missing: bool) -> Result<SuperPoly, AlgebraError> {
        let mut map: Vec<Option<usize>> = Vec::with_capacity(self.ctx.len());
        for g in self.ctx.generators() {
            match target.index_of(&g.name) {
                Ok(j) => {
                    if target.generator(j).gh != g.gh {
                        return Err(AlgebraError::BindingMismatch {
                            generator: g.name.clone(),
                            expected: g.gh,
                            found: Some(target.generator(j).gh),
                        });
                    }
                    map.push(Some(j));
                }
                Err(e) => {
                    if drop_missing {
                        map.push(None);
                    } else {
                        return Err(e);
                    }
                }
            }
        }
        let mut out = SuperPoly::zero(target);
        out.truncated = self.truncated;
        'terms: for (m, c) in &self.terms {
            let mut factors: Vec<(usize, u32)> = Vec::new();
            for i in 0..m.0.len() {
                if m.0[i] == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => factors.push((j, m.0[i])),
                    None => continue 'terms,
                }
            }
            // count transpositions of odd factors while sorting into target order
            let mut neg = false;
            let len = factors.len();
            for a in 0..len {
                for b in 0..len.saturating_sub(1 + a) {
                    if factors[b].0 > factors[b + 1].0 {
                        if target.is_odd(factors[b].0) && target.is_odd(factors[b + 1].0) {
                            neg = !neg;
                        }
                        factors.swap(b, b + 1);
                    }
                }
            }
            let mut nm = Monomial::one(target.len());
            for (j, e) in factors {
                nm.0[j] = e;
            }
            out.add_term(nm, if neg { -c } else { c.clone() });
        }
        Ok(out)
    }

    /// Sets the listed generators to zero.
    pub fn kill(&self, gens: &[usize]) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            if gens.iter().all(|&g| m.0[g] == 0) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// The body: every odd generator set to zero.
    pub fn body(&self) -> SuperPoly {
        let odd: Vec<usize> = (0..self.ctx.len()).filter(|&i| self.ctx.is_odd(i)).collect();
        self.kill(&odd)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.ctx.len()))
    }

    /// Whether every term contains at least one odd generator.
    pub fn is_nilpotent_soul(&self) -> bool {
        self.terms.keys().all(|m| (0..m.0.len()).any(|i| self.ctx.is_odd(i) && m.0[i] > 0))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Generators that occur anywhere.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ctx.len()).filter(|&i| self.mentions(i)).collect()
    }

    fn fmt_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let n = &self.ctx.generator(i).name;
            if e == 1 {
                parts.push(n.clone());
            } else {
                parts.push(format!("{}^{}", n, e));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", self.fmt_monomial(m))?;
            } else {
                write!(f, "[{}]*{}", c, self.fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl Add for &SuperPoly {
    type Output = SuperPoly;
    fn add(self, o: &SuperPoly) -> SuperPoly {
        self.try_add(o).expect("context mismatch in +")
    }
}

impl Sub for &SuperPoly {
    type Output = SuperPoly;
    fn sub(self, o: &SuperPoly) -> SuperPoly {
        self.try_sub(o).expect("context mismatch in -")
    }
}

impl Mul for &SuperPoly {
    type Output = SuperPoly;
    fn mul(self, o: &SuperPoly) -> SuperPoly {
        self.try_mul(o).expect("context mismatch in *")
    }
}

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c);
        }
        out
    }
}

/// (−1)^n as a scalar.
pub fn sign(n: i64) -> Scalar {
    if n.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::from_pairs("t", &[("x", 0), ("t1", 1), ("t2", 1)]).unwrap()
    }

    #[test]
    fn odd_generators_anticommute() {
        let c = ctx();
        let t1 = SuperPoly::var(&c, "t1").unwrap();
        let t2 = SuperPoly::var(&c, "t2").unwrap();
        assert_eq!(&t2 * &t1, -&(&t1 * &t2));
        assert!((&t1 * &t1).is_zero());
    }

    #[test]
    fn derivative_examples() {
        let c = ctx();
        let t1 = SuperPoly::var(&c, "t1").unwrap();
        let t2 = SuperPoly::var(&c, "t2").unwrap();
        let x = SuperPoly::var(&c, "x").unwrap();
        let f = &t1 * &t2;
        assert_eq!(f.left_derive_by("t1").unwrap(), t2);
        assert_eq!(f.left_derive_by("t2").unwrap(), -&t1);
        assert_eq!(f.right_derive_by("t1").unwrap(), -&t2);
        assert_eq!(t1.right_derive_by("t1").unwrap(), SuperPoly::one(&c));
        let g = &(&x * &x) * &t1;
        assert_eq!(g.left_derive_by("x").unwrap(), (&x * &t1).scale_int(2));
    }

    #[test]
    fn substitution_examples() {
        let c = ctx();
        let t1 = SuperPoly::var(&c, "t1").unwrap();
        let t2 = SuperPoly::var(&c, "t2").unwrap();
        let f = &t1 * &t2;
        let g = f.substitute_named(&[("t2", &t2 + &t1)]).unwrap();
        assert_eq!(g, f);
        let bad = f.substitute_named(&[("t2", SuperPoly::var(&c, "x").unwrap())]);
        assert!(matches!(bad, Err(AlgebraError::BindingMismatch { .. })));
    }

    #[test]
    fn lift_reorders_with_sign() {
        let a = Context::from_pairs("a", &[("t1", 1), ("t2", 1)]).unwrap();
        let b = Context::from_pairs("b", &[("t2", 1), ("t1", 1)]).unwrap();
        let f = &SuperPoly::var(&a, "t1").unwrap() * &SuperPoly::var(&a, "t2").unwrap();
        let g = f.lift(&b).unwrap();
        let expect = -&(&SuperPoly::var(&b, "t2").unwrap() * &SuperPoly::var(&b, "t1").unwrap());
        assert_eq!(g, expect);
        assert_eq!(g, &SuperPoly::var(&b, "t1").unwrap() * &SuperPoly::var(&b, "t2").unwrap());
    }
}
