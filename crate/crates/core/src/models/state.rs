//! Effective states: Gaussian elimination of the fluctuation fields, gluing
//! along interfaces and comparison of states up to constants.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::field::{mqme_prefactor, BoundaryComplex, BoundaryOperator, DiscreteBF, MqmeReport};
use super::{a_name, b_name, build_bf_in, chain_contraction, Cell, ChainComplexModel, ChainContraction, Incidence, ModelError};
use crate::algebra::{Context, Generator, SuperPoly};
use crate::bv::BVSpace;
use crate::linalg::{Matrix, Q};
use crate::polyspace::{monomials, solve_operator, Basis, Solve};
use crate::scalar::{Gauss, Scalar, Window};
use crate::supermatrix::SuperMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualPair {
    pub alpha: String,
    pub beta: String,
    /// Cell degree of the representative.
    pub degree: u32,
}

impl ResidualPair {
    pub fn alpha_gh(&self) -> i32 {
        1 - self.degree as i32
    }

    pub fn beta_gh(&self) -> i32 {
        self.degree as i32 - 2
    }
}

/// ψ = e^{(i/ħ)S_eff} on base and residual variables, up to a constant.
#[derive(Clone, Debug)]
pub struct DiscreteState {
    dimension: u32,
    boundary: BoundaryComplex,
    residuals: Vec<ResidualPair>,
    space: BVSpace,
    action: SuperPoly,
    one_loop: String,
}

fn state_space(boundary: &BoundaryComplex, residuals: &[ResidualPair], window: Window) -> Result<BVSpace, ModelError> {
    let mut gens = Vec::new();
    for r in residuals {
        gens.push(Generator::new(r.alpha.clone(), r.alpha_gh()));
        gens.push(Generator::new(r.beta.clone(), r.beta_gh()));
    }
    gens.extend(boundary.base_generators());
    let ctx = Context::with_window("state", gens, window)?;
    Ok(BVSpace::new(&ctx, (0..residuals.len()).map(|i| (2 * i, 2 * i + 1)).collect())?)
}

fn rational(q: &Q) -> Scalar {
    Scalar::from_rational(q.clone())
}

fn linear(ctx: &Context, terms: impl IntoIterator<Item = (String, Q)>) -> Result<SuperPoly, ModelError> {
    let mut out = SuperPoly::zero(ctx);
    for (n, c) in terms {
        if !c.is_zero() {
            out = &out + &SuperPoly::var(ctx, &n)?.scale(&rational(&c));
        }
    }
    Ok(out)
}

pub fn effective_action(bf: &DiscreteBF, contraction: &ChainContraction) -> Result<DiscreteState, ModelError> {
    effective_action_with(bf, contraction, None)
}

/// Eliminates the fluctuations in im K (A-side) and im Kᵀ (B-side); residual
/// representatives are P·reference when a reference basis is given.
pub fn effective_action_with(
    bf: &DiscreteBF,
    contraction: &ChainContraction,
    reference: Option<&[Vec<Q>]>,
) -> Result<DiscreteState, ModelError> {
    contraction.verify()?;
    let cx = bf.model();
    let cells = cx.cells();
    let reps = contraction.representatives(reference);
    let duals = contraction.dual_representatives(&reps)?;
    let mut residuals = Vec::new();
    for (i, v) in reps.iter().enumerate() {
        let degree = contraction
            .degree_of(v)
            .ok_or_else(|| ModelError::Degenerate("zero residual representative".into()))?;
        residuals.push(ResidualPair { alpha: format!("alpha{i}"), beta: format!("beta{i}"), degree });
    }
    let boundary = bf.boundary().clone();
    let space = state_space(&boundary, &residuals, bf.context().window())?;
    let ctx = space.context().clone();
    let d = cx.coboundary();
    let y = &contraction.cells;
    let k = &contraction.homotopy;
    let a_fixed: Vec<usize> = cx.boundary_a().iter().copied().collect();
    let b_fixed: Vec<usize> = cx.boundary_b().iter().copied().collect();
    // u = J a on interior rows, w = b M on interior columns
    let mut u = Vec::new();
    let mut w = Vec::new();
    for &c in y {
        u.push(linear(&ctx, a_fixed.iter().map(|&s| (a_name(&cells[s].name), d.get(c, s).clone())))?);
        w.push(linear(&ctx, b_fixed.iter().map(|&t| (b_name(&cells[t].name), d.get(t, c).clone())))?);
    }
    let mut bindings = HashMap::new();
    let bctx = bf.context();
    for (i, &c) in y.iter().enumerate() {
        let mut av = linear(&ctx, residuals.iter().zip(&reps).map(|(r, v)| (r.alpha.clone(), v[i].clone())))?;
        let mut bv = linear(&ctx, residuals.iter().zip(&duals).map(|(r, v)| (r.beta.clone(), v[i].clone())))?;
        for j in 0..y.len() {
            let kij = k.get(i, j);
            if !kij.is_zero() {
                av = &av - &u[j].scale(&rational(kij));
            }
            let kji = k.get(j, i);
            if !kji.is_zero() {
                bv = &bv - &w[j].scale(&rational(kji));
            }
        }
        bindings.insert(bctx.index_of(&a_name(&cells[c].name))?, av);
        bindings.insert(bctx.index_of(&b_name(&cells[c].name))?, bv);
    }
    let action = bf.action().substitute_into(&ctx, &bindings)?;
    let one_loop = one_loop_token(contraction)?;
    Ok(DiscreteState { dimension: cx.dimension(), boundary, residuals, space, action, one_loop })
}

/// Berezinian of the fluctuation pairing ηᵀ d ξ, η ∈ im Kᵀ, ξ ∈ im K, grouped by parity.
fn one_loop_token(c: &ChainContraction) -> Result<String, ModelError> {
    let k = &c.homotopy;
    let xi = k.column_basis();
    let eta = k.transpose().column_basis();
    let parity_a = |v: &[Q]| c.degree_of(v).map(|d| (1 + d) % 2);
    let parity_b = |v: &[Q]| c.degree_of(v).map(|d| d % 2);
    let group = |vs: &[Vec<Q>], par: &dyn Fn(&[Q]) -> Option<u32>, want: u32| -> Vec<Vec<Q>> {
        vs.iter().filter(|v| par(v) == Some(want)).cloned().collect()
    };
    let ctx = Context::new("constants", Vec::new())?;
    let block = |rows: &[Vec<Q>], cols: &[Vec<Q>]| -> Result<Vec<Vec<SuperPoly>>, ModelError> {
        if rows.len() != cols.len() {
            return Err(ModelError::Degenerate("fluctuation pairing is not square".into()));
        }
        Ok(rows
            .iter()
            .map(|r| {
                let rd = c.d.transpose().mul_vec(r);
                cols.iter()
                    .map(|x| {
                        let v: Q = rd.iter().zip(x).map(|(a, b)| a * b).sum();
                        SuperPoly::constant(&ctx, rational(&v))
                    })
                    .collect()
            })
            .collect())
    };
    let (xe, xo) = (group(&xi, &parity_a, 0), group(&xi, &parity_a, 1));
    let (ee, eo) = (group(&eta, &parity_b, 0), group(&eta, &parity_b, 1));
    let a = block(&ee, &xe)?;
    let dd = block(&eo, &xo)?;
    let (p, q) = (a.len(), dd.len());
    let zero = SuperPoly::zero(&ctx);
    let (b, cc) = (vec![vec![zero.clone(); q]; p], vec![vec![zero; p]; q]);
    let m = SuperMatrix::new(&ctx, p, q, a, b, cc, dd)?;
    if !m.is_invertible() {
        return Err(ModelError::Degenerate("fluctuation pairing is singular".into()));
    }
    Ok(format!("ber({})", m.berezinian()?.constant_term()))
}

impl DiscreteState {
    pub fn context(&self) -> &Context {
        self.space.context()
    }

    pub fn space(&self) -> &BVSpace {
        &self.space
    }

    pub fn action(&self) -> &SuperPoly {
        &self.action
    }

    pub fn boundary(&self) -> &BoundaryComplex {
        &self.boundary
    }

    pub fn residuals(&self) -> &[ResidualPair] {
        &self.residuals
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// The one-loop normalization, a basis-dependent constant.
    pub fn one_loop(&self) -> &str {
        &self.one_loop
    }

    pub fn omega0(&self) -> Result<BoundaryOperator, ModelError> {
        self.boundary.operator(self.context())
    }

    /// (ħ²Δ_res + Ω₀)e^{(i/ħ)S_eff}.
    pub fn check_mqme(&self) -> Result<MqmeReport, ModelError> {
        mqme_prefactor(self.space.pairs(), &self.omega0()?, &self.action)
    }

    /// The same state with a different action on the same variables.
    pub fn with_action(&self, action: SuperPoly) -> Result<DiscreteState, ModelError> {
        self.context().same_as(action.context())?;
        Ok(DiscreteState { action, ..self.clone() })
    }

    /// Flips the sign of the first term of the action that mentions `var`.
    pub fn corrupted(&self, var: &str) -> Result<DiscreteState, ModelError> {
        let ctx = self.context().clone();
        let v = ctx.index_of(var)?;
        let mut out = SuperPoly::zero(&ctx);
        let mut flipped = false;
        for (m, c) in self.action.terms() {
            let t = SuperPoly::term(&ctx, m.clone(), c.clone());
            if !flipped && m.exp(v) > 0 {
                flipped = true;
                out = &out - &t;
            } else {
                out = &out + &t;
            }
        }
        self.with_action(out)
    }

    fn a_vars(&self) -> Vec<(String, String, u32)> {
        let mut v: Vec<_> =
            self.boundary.a_cells.iter().map(|c| (c.name.clone(), a_name(&c.name), c.degree)).collect();
        v.extend(self.residuals.iter().map(|r| (r.alpha.clone(), r.alpha.clone(), r.degree)));
        v
    }

    fn b_vars(&self) -> Vec<(String, String, u32)> {
        let mut v: Vec<_> =
            self.boundary.b_cells.iter().map(|c| (c.name.clone(), b_name(&c.name), c.degree)).collect();
        v.extend(self.residuals.iter().map(|r| (r.alpha.clone(), r.beta.clone(), r.degree)));
        v
    }

    /// Coefficient d_τσ of B_τ A_σ in the action.
    fn coupling(&self, b_var: &str, a_var: &str) -> Result<Q, ModelError> {
        let ctx = self.context();
        let c = self.action.right_derive(ctx.index_of(a_var)?).left_derive(ctx.index_of(b_var)?);
        if c.is_zero() {
            return Ok(Q::zero());
        }
        if !c.is_constant() {
            return Err(ModelError::NotBilinear(format!("coefficient of {b_var}·{a_var} is {c}")));
        }
        c.constant_term()
            .as_rational()
            .ok_or_else(|| ModelError::NotBilinear(format!("coefficient of {b_var}·{a_var} is not rational")))
    }

    /// Reads the action as ⟨B, dA⟩ on a complex whose interior cells are the residual pairs.
    pub fn as_model(&self) -> Result<ChainComplexModel, ModelError> {
        let ctx = self.context();
        let mut cells: Vec<Cell> = self.boundary.a_cells.clone();
        cells.extend(self.boundary.b_cells.iter().cloned());
        cells.extend(self.residuals.iter().map(|r| Cell::new(r.alpha.clone(), r.degree)));
        let mut inc: Vec<Incidence> = Vec::new();
        let mut rebuilt = SuperPoly::zero(ctx);
        for (bcell, bvar, bd) in self.b_vars() {
            for (acell, avar, ad) in self.a_vars() {
                let v = self.coupling(&bvar, &avar)?;
                if v.is_zero() {
                    continue;
                }
                if bd != ad + 1 {
                    return Err(ModelError::NotBilinear(format!("{bvar}·{avar} couples degrees {bd} and {ad}")));
                }
                let t = &SuperPoly::var(ctx, &bvar)? * &SuperPoly::var(ctx, &avar)?;
                rebuilt = &rebuilt + &t.scale(&rational(&v));
                inc.push((bcell.clone(), acell.clone(), v));
            }
        }
        if rebuilt != self.action {
            return Err(ModelError::NotBilinear(format!("residue {}", &self.action - &rebuilt)));
        }
        let bl = &self.boundary;
        for (i, t) in bl.a_cells.iter().enumerate() {
            for (j, s) in bl.a_cells.iter().enumerate() {
                if !bl.d_aa.get(i, j).is_zero() {
                    inc.push((t.name.clone(), s.name.clone(), bl.d_aa.get(i, j).clone()));
                }
            }
        }
        for (i, t) in bl.b_cells.iter().enumerate() {
            for (j, s) in bl.b_cells.iter().enumerate() {
                if !bl.d_bb.get(i, j).is_zero() {
                    inc.push((t.name.clone(), s.name.clone(), bl.d_bb.get(i, j).clone()));
                }
            }
        }
        let an: Vec<&str> = bl.a_cells.iter().map(|c| c.name.as_str()).collect();
        let bn: Vec<&str> = bl.b_cells.iter().map(|c| c.name.as_str()).collect();
        let dim = cells.iter().map(|c| c.degree).max().unwrap_or(0).max(self.dimension);
        ChainComplexModel::new(dim, cells, &inc, &an, &bn)
    }
}

/// An interface identification: a boundary cell of the first state, one of the
/// second, and the incidence sign between them in the glued complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub left: String,
    pub right: String,
    pub sign: i64,
}

impl Match {
    pub fn new(left: &str, right: &str, sign: i64) -> Self {
        Match { left: left.to_string(), right: right.to_string(), sign }
    }
}

const LEFT: &str = "1.";
const RIGHT: &str = "2.";

fn prefixed_boundary(b: &BoundaryComplex, prefix: &str) -> BoundaryComplex {
    let re = |cs: &[Cell]| cs.iter().map(|c| Cell::new(format!("{prefix}{}", c.name), c.degree)).collect();
    BoundaryComplex { a_cells: re(&b.a_cells), b_cells: re(&b.b_cells), d_aa: b.d_aa.clone(), d_bb: b.d_bb.clone() }
}

fn restrict(cells: &[Cell], d: &Matrix, keep: &[bool]) -> (Vec<Cell>, Matrix) {
    let idx: Vec<usize> = (0..cells.len()).filter(|&i| keep[i]).collect();
    let mut m = Matrix::zeros(idx.len(), idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m.set(a, b, d.get(i, j).clone());
        }
    }
    (idx.iter().map(|&i| cells[i].clone()).collect(), m)
}

/// The interface incidences (B-cell, A-cell, sign) in prefixed names.
pub fn interface_incidences(
    s1: &DiscreteState,
    s2: &DiscreteState,
    matches: &[Match],
) -> Result<Vec<Incidence>, ModelError> {
    let find = |cs: &[Cell], n: &str| cs.iter().find(|c| c.name == n).map(|c| c.degree);
    let mut out = Vec::new();
    for m in matches {
        let (b1, b2) = (&s1.boundary, &s2.boundary);
        let (bcell, bdeg, acell, adeg) = match (
            find(&b1.a_cells, &m.left),
            find(&b1.b_cells, &m.left),
            find(&b2.a_cells, &m.right),
            find(&b2.b_cells, &m.right),
        ) {
            (Some(ad), None, None, Some(bd)) => (format!("{RIGHT}{}", m.right), bd, format!("{LEFT}{}", m.left), ad),
            (None, Some(bd), Some(ad), None) => (format!("{LEFT}{}", m.left), bd, format!("{RIGHT}{}", m.right), ad),
            (None, None, _, _) => return Err(ModelError::Interface(format!("`{}` is not a boundary cell", m.left))),
            (_, _, None, None) => return Err(ModelError::Interface(format!("`{}` is not a boundary cell", m.right))),
            _ => return Err(ModelError::PolarizationClash(format!("{} and {}", m.left, m.right))),
        };
        if bdeg != adeg + 1 {
            return Err(ModelError::Interface(format!("{bcell} (degree {bdeg}) cannot bound {acell} (degree {adeg})")));
        }
        if m.sign != 1 && m.sign != -1 {
            return Err(ModelError::Interface(format!("sign {} is not ±1", m.sign)));
        }
        out.push((bcell, acell, Q::from_integer(m.sign.into())));
    }
    Ok(out)
}

/// Renames every variable of a state with the given prefix inside `target`.
fn relabel(s: &DiscreteState, prefix: &str, target: &Context) -> Result<SuperPoly, ModelError> {
    let ctx = s.context();
    let mut bindings = HashMap::new();
    let mut rename = |from: String, to: String| -> Result<(), ModelError> {
        bindings.insert(ctx.index_of(&from)?, SuperPoly::var(target, &to)?);
        Ok(())
    };
    for r in &s.residuals {
        rename(r.alpha.clone(), format!("{prefix}{}", r.alpha))?;
        rename(r.beta.clone(), format!("{prefix}{}", r.beta))?;
    }
    for c in &s.boundary.a_cells {
        rename(a_name(&c.name), a_name(&format!("{prefix}{}", c.name)))?;
    }
    for c in &s.boundary.b_cells {
        rename(b_name(&c.name), b_name(&format!("{prefix}{}", c.name)))?;
    }
    Ok(s.action.substitute_into(target, &bindings)?)
}

/// Pairs the interface variables of two states, integrates them out, and
/// pushes the combined residual fields forward to the cohomology of the glued complex.
pub fn glue(s1: &DiscreteState, s2: &DiscreteState, matches: &[Match]) -> Result<DiscreteState, ModelError> {
    let inc = interface_incidences(s1, s2, matches)?;
    let mid = pair_interface(s1, s2, &inc)?;
    let model = mid.as_model()?;
    let bf = build_bf_in(&model, s1.context().window())?;
    let c = chain_contraction(&model)?;
    let mut out = effective_action(&bf, &c)?;
    out.one_loop = format!("{}·{}·{}", s1.one_loop, s2.one_loop, out.one_loop);
    Ok(out)
}

/// The intermediate state after the interface integral, before the residual pushforward.
pub fn pair_interface(s1: &DiscreteState, s2: &DiscreteState, inc: &[Incidence]) -> Result<DiscreteState, ModelError> {
    let (p1, p2) = (prefixed_boundary(&s1.boundary, LEFT), prefixed_boundary(&s2.boundary, RIGHT));
    let interface: Vec<&str> = inc.iter().flat_map(|(b, a, _)| [b.as_str(), a.as_str()]).collect();
    let mut a_cells = Vec::new();
    let mut b_cells = Vec::new();
    let mut d_aa_parts = Vec::new();
    let mut d_bb_parts = Vec::new();
    for p in [&p1, &p2] {
        let keep_a: Vec<bool> = p.a_cells.iter().map(|c| !interface.contains(&c.name.as_str())).collect();
        let keep_b: Vec<bool> = p.b_cells.iter().map(|c| !interface.contains(&c.name.as_str())).collect();
        let (ac, da) = restrict(&p.a_cells, &p.d_aa, &keep_a);
        let (bc, db) = restrict(&p.b_cells, &p.d_bb, &keep_b);
        a_cells.extend(ac);
        b_cells.extend(bc);
        d_aa_parts.push(da);
        d_bb_parts.push(db);
    }
    let block_diag = |parts: &[Matrix]| {
        let n: usize = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(n, n);
        let mut off = 0;
        for m in parts {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(off + i, off + j, m.get(i, j).clone());
                }
            }
            off += m.rows;
        }
        out
    };
    let boundary = BoundaryComplex { a_cells, b_cells, d_aa: block_diag(&d_aa_parts), d_bb: block_diag(&d_bb_parts) };
    let mut residuals: Vec<ResidualPair> = Vec::new();
    for (s, p) in [(s1, LEFT), (s2, RIGHT)] {
        residuals.extend(s.residuals.iter().map(|r| ResidualPair {
            alpha: format!("{p}{}", r.alpha),
            beta: format!("{p}{}", r.beta),
            degree: r.degree,
        }));
    }
    let space = state_space(&boundary, &residuals, s1.context().window())?;
    let reduced = space.context().clone();
    // full context: reduced variables followed by the interface variables
    let mut extra = Vec::new();
    for (b, a, _) in inc {
        let bd = p1.b_cells.iter().chain(&p2.b_cells).find(|c| &c.name == b).expect("matched").degree;
        let ad = p1.a_cells.iter().chain(&p2.a_cells).find(|c| &c.name == a).expect("matched").degree;
        extra.push(Generator::new(b_name(b), bd as i32 - 2));
        extra.push(Generator::new(a_name(a), 1 - ad as i32));
    }
    let full = reduced.extended("glue", extra)?;
    let mut s = &relabel(s1, LEFT, &full)? + &relabel(s2, RIGHT, &full)?;
    for (b, a, v) in inc {
        let t = &SuperPoly::var(&full, &b_name(b))? * &SuperPoly::var(&full, &a_name(a))?;
        s = &s + &t.scale(&rational(v));
    }
    let z: Vec<usize> = (reduced.len()..full.len()).collect();
    let n = z.len();
    let mut c = Matrix::zeros(n, n);
    let mut rhs = Vec::new();
    for (i, &zi) in z.iter().enumerate() {
        let dz = s.left_derive(zi);
        for (j, &zj) in z.iter().enumerate() {
            let e = dz.left_derive(zj);
            if e.is_zero() {
                continue;
            }
            let v = e
                .is_constant()
                .then(|| e.constant_term().as_rational())
                .flatten()
                .ok_or_else(|| ModelError::NotBilinear("interface coupling is not a rational constant".into()))?;
            c.set(i, j, v);
        }
        rhs.push(dz.kill(&z).project(&reduced)?);
    }
    let cinv = c.inverse().ok_or_else(|| ModelError::Degenerate("interface pairing is singular".into()))?;
    let mut bindings = HashMap::new();
    for (j, &zj) in z.iter().enumerate() {
        let mut v = SuperPoly::zero(&reduced);
        for (i, r) in rhs.iter().enumerate() {
            let x = cinv.get(j, i);
            if !x.is_zero() {
                v = &v - &r.scale(&rational(x));
            }
        }
        bindings.insert(zj, v);
    }
    let action = s.substitute_into(&reduced, &bindings)?;
    Ok(DiscreteState {
        dimension: s1.dimension.max(s2.dimension),
        boundary,
        residuals,
        space,
        action,
        one_loop: format!("{}·{}", s1.one_loop, s2.one_loop),
    })
}

/// Result of comparing two states up to constants and residual basis changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub differences: Vec<String>,
}

fn coupling_matrix(s: &DiscreteState, rows: &[String], cols: &[String]) -> Result<Matrix, ModelError> {
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (i, b) in rows.iter().enumerate() {
        for (j, a) in cols.iter().enumerate() {
            m.set(i, j, s.coupling(b, a)?);
        }
    }
    Ok(m)
}

/// Compares base variables positionally, the residual ghost numbers, the
/// base–base couplings and the residual-mediated couplings; constants ignored.
pub fn states_equivalent(s1: &DiscreteState, s2: &DiscreteState) -> Result<Equivalence, ModelError> {
    let mut differences = Vec::new();
    let degs = |cs: &[Cell]| cs.iter().map(|c| c.degree).collect::<Vec<_>>();
    if degs(&s1.boundary.a_cells) != degs(&s2.boundary.a_cells) {
        differences.push("A-fixed boundary differs".to_string());
    }
    if degs(&s1.boundary.b_cells) != degs(&s2.boundary.b_cells) {
        differences.push("B-fixed boundary differs".to_string());
    }
    let ghs = |s: &DiscreteState| {
        let mut g: Vec<i32> = s.residuals.iter().flat_map(|r| [r.alpha_gh(), r.beta_gh()]).collect();
        g.sort();
        g
    };
    if ghs(s1) != ghs(s2) {
        differences.push(format!("residual ghost numbers {:?} vs {:?}", ghs(s1), ghs(s2)));
    }
    if !differences.is_empty() {
        return Ok(Equivalence { equivalent: false, differences });
    }
    let names = |s: &DiscreteState| {
        let a: Vec<String> = s.boundary.a_cells.iter().map(|c| a_name(&c.name)).collect();
        let b: Vec<String> = s.boundary.b_cells.iter().map(|c| b_name(&c.name)).collect();
        let al: Vec<String> = s.residuals.iter().map(|r| r.alpha.clone()).collect();
        let be: Vec<String> = s.residuals.iter().map(|r| r.beta.clone()).collect();
        (a, b, al, be)
    };
    let mut invariants = Vec::new();
    for s in [s1, s2] {
        let (a, b, al, be) = names(s);
        let direct = coupling_matrix(s, &b, &a)?;
        let to_alpha = coupling_matrix(s, &b, &al)?;
        let from_beta = coupling_matrix(s, &be, &a)?;
        let internal = coupling_matrix(s, &be, &al)?;
        invariants.push((direct, to_alpha.mul(&from_beta), internal.is_zero(), to_alpha, from_beta.transpose()));
    }
    let same_span = |x: &Matrix, y: &Matrix| {
        let r = x.rank();
        r == y.rank() && (x.cols == 0 || y.cols == 0 || r == x.hstack(y).rank())
    };
    if !same_span(&invariants[0].3, &invariants[1].3) {
        differences.push("B-base variables see different residual directions".to_string());
    }
    if !same_span(&invariants[0].4, &invariants[1].4) {
        differences.push("A-base variables see different residual directions".to_string());
    }
    if invariants[0].0 != invariants[1].0 {
        differences.push("base–base couplings differ".to_string());
    }
    if invariants[0].1 != invariants[1].1 {
        differences.push("residual-mediated couplings differ".to_string());
    }
    if !invariants[0].2 || !invariants[1].2 {
        differences.push("residual fields couple among themselves".to_string());
    }
    Ok(Equivalence { equivalent: differences.is_empty(), differences })
}

/// Effect of replacing the standard contraction by a weighted one.
#[derive(Clone, Debug)]
pub struct ContractionChange {
    pub standard: DiscreteState,
    pub changed: DiscreteState,
    /// S′_eff − S_eff.
    pub difference: SuperPoly,
    /// F with (ħ²Δ + Ω₀)(F ψ) = (i/ħ)(S′ − S) ψ.
    pub primitive: Option<SuperPoly>,
    /// The primitive re-applied reproduces the right-hand side.
    pub verified: bool,
}

pub fn contraction_change(bf: &DiscreteBF, weights: &[Q]) -> Result<ContractionChange, ModelError> {
    let c0 = chain_contraction(bf.model())?;
    let c1 = ChainContraction::weighted(bf.model(), weights)?;
    let standard = effective_action(bf, &c0)?;
    let changed = effective_action_with(bf, &c1, Some(&c0.harmonic))?;
    let ctx = standard.context().clone();
    let difference = &changed.action.lift(&ctx)? - &standard.action;
    let target = difference.scale(&Scalar::from_gauss(Gauss::i(), -1));
    let omega = standard.omega0()?;
    let pairs = standard.space.pairs().to_vec();
    let vars: Vec<usize> = (0..ctx.len()).collect();
    let basis = Basis::full(&ctx, &monomials(&ctx, &vars, 2, Some(-1)), -3, 1, true);
    let op = |f: &SuperPoly| super::dressed_operator(&pairs, &omega, &standard.action, f);
    let (primitive, verified) = match solve_operator(&basis, &target, op)? {
        Solve::Solution { x, .. } => {
            let ok = super::dressed_operator(&pairs, &omega, &standard.action, &x)? == target;
            (Some(x), ok)
        }
        Solve::Inconsistent { .. } => (None, false),
    };
    Ok(ContractionChange { standard, changed, difference, primitive, verified })
}

/// Ghost numbers of the residual fields, sorted.
pub fn residual_ghosts(s: &DiscreteState) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for r in &s.residuals {
        *out.entry(r.alpha_gh()).or_insert(0) += 1;
        *out.entry(r.beta_gh()).or_insert(0) += 1;
    }
    out
}
