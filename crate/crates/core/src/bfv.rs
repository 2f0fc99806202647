//! BFV ghost extension of constraint systems, order-by-order solution of
//! {S,S} = 0, and degree-zero cohomology against N(I)/I.
//!
//! The extended bracket adds {b_i, c^i} = {c^i, b_i} = 1 to the base
//! bracket. With Q = {S, ·} one finds Q(b) = φ, and for constant structure
//! constants the action is S = Σ c^iφ_i − ½ Σ f_{ij}^k b_k c^i c^j.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, Context, Generator, Monomial, SuperPoly};
use crate::bv::{BvError, GradedPoisson};
use crate::cartan::VectorField;
use crate::linalg::{Matrix, Q};
use crate::polyspace::{coordinates, monomials, operator_matrix, solve_operator, Basis, Coord, Solve};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BfvError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Bv(#[from] BvError),
    #[error("base bracket must have degree 0 on even generators")]
    BaseNotEven,
    #[error("constraint {0} must be even of ghost number 0")]
    ConstraintDegree(usize),
    #[error("{{φ_{i}, φ_{j}}} is not in the ideal; remainder {remainder}")]
    Closure { i: usize, j: usize, remainder: String },
    #[error("structure functions have the wrong shape")]
    StructureShape,
    #[error("b-degree {degree}: no correction with base degree ≤ {cutoff}; right-hand side has base degree {needed}")]
    CutoffExceeded { degree: usize, cutoff: u32, needed: u32 },
    #[error("b-degree {degree}: the correction equation is inconsistent ({} certificate entries)", certificate.len())]
    Obstruction { degree: usize, certificate: Vec<(Coord, Q)> },
}

/// Even constraints φ_i on an even Poisson base with {φ_i, φ_j} = Σ f_{ij}^k φ_k.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    base: GradedPoisson,
    constraints: Vec<SuperPoly>,
    structure: Vec<Vec<Vec<SuperPoly>>>,
}

/// Monomial multipliers allowed beyond the target degree in ideal membership.
const EXTRA_DEGREE: u32 = 2;

/// Largest dense matrix (rows × columns) `n_mod_i_dimension` will build.
pub const DENSE_CELL_LIMIT: usize = 400_000;

fn base_vars(ctx: &Context) -> Vec<usize> {
    (0..ctx.len()).collect()
}

/// Coefficients g_k with Σ g_k φ_k = target, with deg g_k ≤ deg(target) + EXTRA_DEGREE.
pub fn ideal_membership(ctx: &Context, gens: &[SuperPoly], target: &SuperPoly) -> Option<Vec<SuperPoly>> {
    if target.is_zero() {
        return Some(vec![SuperPoly::zero(ctx); gens.len()]);
    }
    if gens.is_empty() {
        return None;
    }
    let deg = target.max_degree() + EXTRA_DEGREE;
    let monos = monomials(ctx, &base_vars(ctx), deg, None);
    let mut cols: Vec<(usize, Monomial)> = Vec::new();
    let mut images = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        for m in &monos {
            cols.push((k, m.clone()));
            images.push(&SuperPoly::term(ctx, m.clone(), Scalar::one()) * g);
        }
    }
    let mut rows: BTreeMap<Coord, usize> = BTreeMap::new();
    for p in images.iter().chain(std::iter::once(target)) {
        for key in coordinates(p).into_keys() {
            let n = rows.len();
            rows.entry(key).or_insert(n);
        }
    }
    let mut a = Matrix::zeros(rows.len(), cols.len());
    for (j, p) in images.iter().enumerate() {
        for (key, v) in coordinates(p) {
            a.set(rows[&key], j, v);
        }
    }
    let mut b = vec![Q::zero(); rows.len()];
    for (key, v) in coordinates(target) {
        b[rows[&key]] = v;
    }
    let x = a.solve(&b)?;
    let mut out = vec![SuperPoly::zero(ctx); gens.len()];
    for ((k, m), v) in cols.into_iter().zip(x) {
        if !v.is_zero() {
            out[k] = &out[k] + &SuperPoly::term(ctx, m, Scalar::from_rational(v));
        }
    }
    Some(out)
}

impl ConstraintSystem {
    /// Validates closure; when `structure` is None the structure functions are
    /// found by ideal membership.
    pub fn new(
        base: GradedPoisson,
        constraints: Vec<SuperPoly>,
        structure: Option<Vec<Vec<Vec<SuperPoly>>>>,
    ) -> Result<Self, BfvError> {
        let ctx = base.context().clone();
        if base.degree() != 0 || ctx.generators().iter().any(|g| g.gh != 0) {
            return Err(BfvError::BaseNotEven);
        }
        for (i, c) in constraints.iter().enumerate() {
            ctx.same_as(c.context())?;
            if c.is_zero() || c.ghost_number() != Some(0) {
                return Err(BfvError::ConstraintDegree(i));
            }
        }
        let n = constraints.len();
        let mut f = vec![vec![vec![SuperPoly::zero(&ctx); n]; n]; n];
        if let Some(s) = &structure {
            if s.len() != n || s.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
                return Err(BfvError::StructureShape);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let br = base.bracket(&constraints[i], &constraints[j])?;
                let coeffs = match &structure {
                    Some(s) => {
                        let mut rem = br.clone();
                        for k in 0..n {
                            rem = &rem - &(&s[i][j][k] * &constraints[k]);
                        }
                        if !rem.is_zero() {
                            return Err(BfvError::Closure { i, j, remainder: rem.to_string() });
                        }
                        s[i][j].clone()
                    }
                    None => ideal_membership(&ctx, &constraints, &br)
                        .ok_or_else(|| BfvError::Closure { i, j, remainder: br.to_string() })?,
                };
                f[i][j] = coeffs;
            }
        }
        Ok(ConstraintSystem { base, constraints, structure: f })
    }

    pub fn base(&self) -> &GradedPoisson {
        &self.base
    }

    pub fn constraints(&self) -> &[SuperPoly] {
        &self.constraints
    }

    pub fn structure(&self) -> &[Vec<Vec<SuperPoly>>] {
        &self.structure
    }

    pub fn has_constant_structure(&self) -> bool {
        self.structure.iter().flatten().flatten().all(|p| p.is_constant())
    }
}

/// Ghost-extended space with an action S of ghost number 1.
#[derive(Clone, Debug)]
pub struct BFVData {
    cs: ConstraintSystem,
    ctx: Context,
    poisson: GradedPoisson,
    /// (c^i, b_i) indices in the extended context.
    ghosts: Vec<(usize, usize)>,
    action: SuperPoly,
    certified_b_degree: Option<usize>,
    solution_dims: Vec<usize>,
}

pub fn ghost_extend(cs: &ConstraintSystem) -> Result<BFVData, BfvError> {
    let base = cs.base.context();
    let n = cs.constraints.len();
    let nb = base.len();
    let mut more = Vec::new();
    for i in 1..=n {
        more.push(Generator::new(format!("c{i}"), 1));
    }
    for i in 1..=n {
        more.push(Generator::new(format!("b{i}"), -1));
    }
    let ctx = base.extended(&format!("{}+ghosts", base.name()), more)?;
    let ghosts: Vec<(usize, usize)> = (0..n).map(|i| (nb + i, nb + n + i)).collect();
    let mut entries: Vec<(usize, usize, Scalar)> = cs.base.entries().map(|(i, j, m)| (i, j, m.clone())).collect();
    for &(c, b) in &ghosts {
        entries.push((b, c, Scalar::one()));
        entries.push((c, b, Scalar::one()));
    }
    let poisson = GradedPoisson::new(&ctx, 0, entries)?;
    let lift = |p: &SuperPoly| p.lift(&ctx);
    let mut s = SuperPoly::zero(&ctx);
    for (i, phi) in cs.constraints.iter().enumerate() {
        s = &s + &(&SuperPoly::gen(&ctx, ghosts[i].0) * &lift(phi)?);
    }
    if cs.has_constant_structure() {
        let half = Scalar::from_ratio(-1, 2);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let f = &cs.structure[i][j][k];
                    if f.is_zero() {
                        continue;
                    }
                    let t = &(&SuperPoly::gen(&ctx, ghosts[k].1) * &SuperPoly::gen(&ctx, ghosts[i].0))
                        * &SuperPoly::gen(&ctx, ghosts[j].0);
                    s = &s + &(&t * &lift(f)?).scale(&half);
                }
            }
        }
    }
    let mut data = BFVData {
        cs: cs.clone(),
        ctx,
        poisson,
        ghosts,
        action: s,
        certified_b_degree: None,
        solution_dims: Vec::new(),
    };
    data.certified_b_degree = data.certify(n)?;
    Ok(data)
}

impl BFVData {
    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn poisson(&self) -> &GradedPoisson {
        &self.poisson
    }

    pub fn action(&self) -> &SuperPoly {
        &self.action
    }

    pub fn constraint_system(&self) -> &ConstraintSystem {
        &self.cs
    }

    pub fn ghosts(&self) -> &[(usize, usize)] {
        &self.ghosts
    }

    pub fn ghost_var(&self, i: usize) -> SuperPoly {
        SuperPoly::gen(&self.ctx, self.ghosts[i].0)
    }

    pub fn antighost_var(&self, i: usize) -> SuperPoly {
        SuperPoly::gen(&self.ctx, self.ghosts[i].1)
    }

    /// Highest b-degree up to which {S,S} vanishes; None if it already fails at 0.
    pub fn certified_b_degree(&self) -> Option<usize> {
        self.certified_b_degree
    }

    /// Dimension of the solution space of each correction equation solved so far.
    pub fn solution_dims(&self) -> &[usize] {
        &self.solution_dims
    }

    pub fn bracket(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, BfvError> {
        Ok(self.poisson.bracket(f, g)?)
    }

    pub fn master(&self) -> Result<SuperPoly, BfvError> {
        self.bracket(&self.action, &self.action)
    }

    /// Q = {S, ·}.
    pub fn q_field(&self) -> Result<VectorField, BfvError> {
        Ok(self.poisson.bracket_field(&self.action)?)
    }

    fn b_vars(&self) -> Vec<usize> {
        self.ghosts.iter().map(|g| g.1).collect()
    }

    /// The part of p with exactly r antighosts.
    pub fn b_component(&self, p: &SuperPoly, r: usize) -> SuperPoly {
        let bs = self.b_vars();
        let mut out = SuperPoly::zero(&self.ctx);
        for (m, c) in p.terms() {
            if bs.iter().map(|&b| m.exp(b) as usize).sum::<usize>() == r {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    fn certify(&self, top: usize) -> Result<Option<usize>, BfvError> {
        let m = self.master()?;
        let mut cert = None;
        for r in 0..=top {
            if !self.b_component(&m, r).is_zero() {
                break;
            }
            cert = Some(r);
        }
        Ok(cert)
    }

    /// Solves for corrections S_{r+1} of b-degree r+1 so that {S,S} vanishes at
    /// b-degree r, for r = 0..max_b_degree, searching base degree ≤ cutoff.
    pub fn correct_order_by_order(&self, max_b_degree: usize, cutoff: u32) -> Result<BFVData, BfvError> {
        let mut out = self.clone();
        out.solution_dims.clear();
        let n = self.ghosts.len();
        let nb = self.cs.base.context().len();
        let base_idx: Vec<usize> = (0..nb).collect();
        for r in 0..=max_b_degree {
            let e = out.b_component(&out.master()?, r);
            if e.is_zero() {
                out.solution_dims.push(0);
                continue;
            }
            // unknown: b-degree r+1, c-degree r+2, ghost number 1
            if r + 2 > n {
                return Err(BfvError::Obstruction { degree: r, certificate: Vec::new() });
            }
            let mut monos = Vec::new();
            let ghost_monos = ghost_monomials(&self.ctx, &self.ghosts, r + 2, r + 1);
            for g in &ghost_monos {
                for b in monomials(&self.ctx, &base_idx, cutoff, None) {
                    let mut m = b.clone();
                    for (i, e) in g.0.iter().enumerate() {
                        m.0[i] += e;
                    }
                    monos.push(m);
                }
            }
            let basis = Basis::real(&self.ctx, &monos);
            let s0 = out.b_component(&out.action, 0);
            let target = -&e;
            let op = |x: &SuperPoly| -> Result<SuperPoly, BfvError> {
                let t = &out.bracket(&s0, x)? + &out.bracket(x, &s0)?;
                Ok(out.b_component(&t, r))
            };
            match solve_operator(&basis, &target, op)? {
                Solve::Solution { x, kernel_dim } => {
                    out.solution_dims.push(kernel_dim);
                    out.action = &out.action + &x;
                }
                Solve::Inconsistent { certificate } => {
                    let needed = base_degree(&e, nb);
                    if needed > cutoff {
                        return Err(BfvError::CutoffExceeded { degree: r, cutoff, needed });
                    }
                    return Err(BfvError::Obstruction { degree: r, certificate });
                }
            }
        }
        out.certified_b_degree = out.certify(max_b_degree.max(n))?;
        Ok(out)
    }

    /// dim H⁰_Q on gh-0 polynomials of total degree ≤ cutoff.
    pub fn q_cohomology_degree0(&self, cutoff: u32) -> Result<Cohomology, BfvError> {
        let q = self.q_field()?;
        let vars: Vec<usize> = (0..self.ctx.len()).collect();
        let shift = self.action.max_degree().saturating_sub(2);
        let c0 = monomials(&self.ctx, &vars, cutoff, Some(0));
        let cm1 = monomials(&self.ctx, &vars, cutoff + shift, Some(-1));
        let apply = |p: &SuperPoly| q.apply(p).map_err(|e| BfvError::Bv(BvError::Cartan(e)));
        let b0 = Basis::real(&self.ctx, &c0);
        let om0 = operator_matrix(&b0, &[], apply)?;
        let kernel = om0.matrix.nullspace();
        let bm1 = Basis::real(&self.ctx, &cm1);
        let imgs: Vec<SuperPoly> = (0..bm1.len()).map(|i| apply(&bm1.element(i))).collect::<Result<_, _>>()?;
        // image vectors in C⁰ coordinates; discard those leaving the degree bound
        let index: BTreeMap<&Monomial, usize> = c0.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut high: BTreeMap<Coord, usize> = BTreeMap::new();
        for p in &imgs {
            for key in coordinates(p).into_keys() {
                if !index.contains_key(&key.0) || key.1 != 0 || key.2 != 0 {
                    let n = high.len();
                    high.entry(key).or_insert(n);
                }
            }
        }
        let mut a_high = Matrix::zeros(high.len(), imgs.len());
        let mut a_low = Matrix::zeros(c0.len(), imgs.len());
        for (j, p) in imgs.iter().enumerate() {
            for (key, v) in coordinates(p) {
                match high.get(&key) {
                    Some(&r) => a_high.set(r, j, v),
                    None => a_low.set(index[&key.0], j, v),
                }
            }
        }
        let ker_high = if high.is_empty() { Matrix::identity(imgs.len()).column_basis() } else { a_high.nullspace() };
        let image_dim = if ker_high.is_empty() {
            0
        } else {
            a_low.mul(&Matrix::from_cols(imgs.len(), &ker_high)).rank()
        };
        let kernel_dim = kernel.len();
        // representatives: kernel vectors independent modulo the image
        let image_vecs: Vec<Vec<Q>> = if ker_high.is_empty() {
            Vec::new()
        } else {
            a_low.mul(&Matrix::from_cols(imgs.len(), &ker_high)).column_basis()
        };
        let mut span = image_vecs.clone();
        let mut reps = Vec::new();
        for v in &kernel {
            let mut trial = span.clone();
            trial.push(v.clone());
            if Matrix::from_cols(c0.len(), &trial).rank() > Matrix::from_cols(c0.len(), &span).rank() {
                span = trial;
                reps.push(b0.combine(v));
            }
        }
        Ok(Cohomology { kernel_dim, image_dim, dimension: kernel_dim - image_dim, representatives: reps })
    }
}

fn ghost_monomials(ctx: &Context, ghosts: &[(usize, usize)], nc: usize, nb: usize) -> Vec<Monomial> {
    let cs: Vec<usize> = ghosts.iter().map(|g| g.0).collect();
    let bs: Vec<usize> = ghosts.iter().map(|g| g.1).collect();
    let mut out = Vec::new();
    for mc in monomials(ctx, &cs, nc as u32, None).into_iter().filter(|m| m.degree() as usize == nc) {
        for mb in monomials(ctx, &bs, nb as u32, None).into_iter().filter(|m| m.degree() as usize == nb) {
            let mut m = mc.clone();
            for &b in &bs {
                m.0[b] = mb.0[b];
            }
            out.push(m);
        }
    }
    out
}

fn base_degree(p: &SuperPoly, nb: usize) -> u32 {
    p.terms().map(|(m, _)| m.0[..nb].iter().sum::<u32>()).max().unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub dimension: usize,
    pub representatives: Vec<SuperPoly>,
}

/// dim N(I)/I on base polynomials of degree ≤ cutoff.
///
/// Returns None when the dense linear system would exceed [`DENSE_CELL_LIMIT`].
pub fn n_mod_i_dimension(cs: &ConstraintSystem, cutoff: u32) -> Option<usize> {
    let ctx = cs.base.context();
    let vars = base_vars(ctx);
    let monos = monomials(ctx, &vars, cutoff, None);
    let n = cs.constraints.len();
    if n == 0 {
        return Some(monos.len());
    }
    let top = cutoff + EXTRA_DEGREE + cs.constraints.iter().map(|p| p.max_degree()).max().unwrap_or(0);
    let mult = monomials(ctx, &vars, top, None);
    // unknowns: f (monos), then g_{ik} (mult) for each i, k
    let nf = monos.len();
    let ng = mult.len();
    let ncols = nf + n * n * ng;
    if ncols.saturating_mul(n * ng + nf) > DENSE_CELL_LIMIT {
        return None;
    }
    let mut rows: BTreeMap<(usize, Coord), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Q)> = Vec::new();
    let mut push = |i: usize, p: &SuperPoly, col: usize, rows: &mut BTreeMap<(usize, Coord), usize>| {
        for (key, v) in coordinates(p) {
            let len = rows.len();
            let r = *rows.entry((i, key)).or_insert(len);
            entries.push((r, col, v));
        }
    };
    for i in 0..n {
        for (j, m) in monos.iter().enumerate() {
            let f = SuperPoly::term(ctx, m.clone(), Scalar::one());
            let br = cs.base.bracket(&f, &cs.constraints[i]).expect("same context");
            push(i, &br, j, &mut rows);
        }
        for k in 0..n {
            for (j, m) in mult.iter().enumerate() {
                let g = &SuperPoly::term(ctx, m.clone(), Scalar::from_int(-1)) * &cs.constraints[k];
                push(i, &g, nf + (i * n + k) * ng + j, &mut rows);
            }
        }
    }
    let mut a = Matrix::zeros(rows.len(), ncols);
    for (r, c, v) in entries {
        let cur = a.get(r, c) + &v;
        a.set(r, c, cur);
    }
    let ker = a.nullspace();
    let proj: Vec<Vec<Q>> = ker.iter().map(|v| v[..nf].to_vec()).collect();
    let dim_n = if proj.is_empty() { 0 } else { Matrix::from_cols(nf, &proj).rank() };
    Some(dim_n - ideal_dimension(cs, cutoff))
}

/// dim of I ∩ (polynomials of degree ≤ cutoff), with generous multipliers.
pub fn ideal_dimension(cs: &ConstraintSystem, cutoff: u32) -> usize {
    let ctx = cs.base.context();
    let vars = base_vars(ctx);
    let top = cutoff + EXTRA_DEGREE;
    let mult = monomials(ctx, &vars, top, None);
    let gens: Vec<SuperPoly> = cs
        .constraints
        .iter()
        .flat_map(|phi| mult.iter().map(move |m| &SuperPoly::term(ctx, m.clone(), Scalar::one()) * phi))
        .collect();
    if gens.is_empty() {
        return 0;
    }
    let mut low: BTreeMap<Coord, usize> = BTreeMap::new();
    let mut high: BTreeMap<Coord, usize> = BTreeMap::new();
    for g in &gens {
        for key in coordinates(g).into_keys() {
            let tgt = if key.0.degree() <= cutoff { &mut low } else { &mut high };
            let n = tgt.len();
            tgt.entry(key).or_insert(n);
        }
    }
    let mut a_low = Matrix::zeros(low.len(), gens.len());
    let mut a_high = Matrix::zeros(high.len(), gens.len());
    for (j, g) in gens.iter().enumerate() {
        for (key, v) in coordinates(g) {
            if let Some(&r) = low.get(&key) {
                a_low.set(r, j, v);
            } else {
                a_high.set(high[&key], j, v);
            }
        }
    }
    let ker = if high.is_empty() { Matrix::identity(gens.len()).column_basis() } else { a_high.nullspace() };
    if ker.is_empty() || low.is_empty() {
        return 0;
    }
    a_low.mul(&Matrix::from_cols(gens.len(), &ker)).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// T*ℝⁿ with generators x1.., p1.. and {x_i, p_i} = 1.
    pub(crate) fn cotangent(n: usize) -> GradedPoisson {
        let mut pairs: Vec<(String, i32)> = (1..=n).map(|i| (format!("x{i}"), 0)).collect();
        pairs.extend((1..=n).map(|i| (format!("p{i}"), 0)));
        let refs: Vec<(&str, i32)> = pairs.iter().map(|(a, b)| (a.as_str(), *b)).collect();
        let ctx = Context::from_pairs("T*R", &refs).unwrap();
        GradedPoisson::darboux(&ctx, 0, &(0..n).map(|i| (i, n + i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_constraint() {
        let base = cotangent(1);
        let ctx = base.context().clone();
        let p = SuperPoly::var(&ctx, "p1").unwrap();
        let cs = ConstraintSystem::new(base, vec![p.clone()], None).unwrap();
        let data = ghost_extend(&cs).unwrap();
        assert!(data.master().unwrap().is_zero());
        let q = data.q_field().unwrap();
        assert_eq!(q.apply(&data.antighost_var(0)).unwrap(), p.lift(data.context()).unwrap());
        for n in 2..=4 {
            assert_eq!(data.q_cohomology_degree0(n).unwrap().dimension, 1, "cutoff {n}");
            assert_eq!(n_mod_i_dimension(&cs, n), Some(1), "cutoff {n}");
        }
    }

    #[test]
    fn abelian_pair() {
        let base = cotangent(2);
        let ctx = base.context().clone();
        let ps = vec![SuperPoly::var(&ctx, "p1").unwrap(), SuperPoly::var(&ctx, "p2").unwrap()];
        let cs = ConstraintSystem::new(base, ps, None).unwrap();
        // flows of p₁, p₂ translate both positions, so the reduced space is a point
        assert_eq!(n_mod_i_dimension(&cs, 3), Some(1));
        let data = ghost_extend(&cs).unwrap();
        assert!(data.master().unwrap().is_zero());
    }

    #[test]
    fn so3_structure_constants() {
        let base = cotangent(3);
        let ctx = base.context().clone();
        let v = |n: &str| SuperPoly::var(&ctx, n).unwrap();
        let l = |a: &str, b: &str, pa: &str, pb: &str| &(&v(a) * &v(pb)) - &(&v(b) * &v(pa));
        let ls = vec![l("x2", "x3", "p2", "p3"), l("x3", "x1", "p3", "p1"), l("x1", "x2", "p1", "p2")];
        let cs = ConstraintSystem::new(base, ls, None).unwrap();
        assert!(cs.has_constant_structure());
        let data = ghost_extend(&cs).unwrap();
        assert!(data.master().unwrap().is_zero());
        assert_eq!(data.action().ghost_number(), Some(1));
    }

    #[test]
    fn q_on_low_ghost_functions() {
        let base = cotangent(1);
        let ctx = base.context().clone();
        let x = SuperPoly::var(&ctx, "x1").unwrap();
        let phi = SuperPoly::var(&ctx, "p1").unwrap();
        let cs = ConstraintSystem::new(base.clone(), vec![phi.clone()], None).unwrap();
        let data = ghost_extend(&cs).unwrap();
        let e = data.context();
        let (f, g) = (x.pow(2), &x + &SuperPoly::int(&ctx, 3));
        let c = data.ghost_var(0);
        let b = data.antighost_var(0);
        let big = &f.lift(e).unwrap() + &(&(&b * &c) * &g.lift(e).unwrap());
        let lhs = data.q_field().unwrap().apply(&big).unwrap();
        let rhs = &(&c * &base.bracket(&phi, &f).unwrap().lift(e).unwrap())
            + &(&(&phi.lift(e).unwrap() * &c) * &g.lift(e).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn non_constant_structure() {
        let base = cotangent(2);
        let ctx = base.context().clone();
        let v = |n: &str| SuperPoly::var(&ctx, n).unwrap();
        let phis = vec![&v("x1").pow(2) * &v("p1"), &v("x1") * &v("p2")];
        let cs = ConstraintSystem::new(base, phis, None).unwrap();
        assert!(!cs.has_constant_structure());
        let data = ghost_extend(&cs).unwrap();
        assert_eq!(data.certified_b_degree(), None);
        let solved = data.correct_order_by_order(2, 3).unwrap();
        assert!(solved.master().unwrap().is_zero());
        assert_eq!(solved.certified_b_degree(), Some(2));
    }
}
