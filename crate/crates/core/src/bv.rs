//! Graded Poisson structures in Darboux form, the BV Laplacian, the
//! antibracket, Hamiltonian fields and master-equation checks.
//!
//! Conventions for a BV space with pairs (qᵢ, pᵢ):
//!
//! * (f, g) = Σ f←∂_q ∂_p g − f←∂_p ∂_q g
//! * Δ = Σ (−1)^{|q|} ∂_q ∂_p
//! * Δ(fg) = Δf·g + (−1)^{|f|} f·Δg + (−1)^{|f|} (f, g)
//! * ω = Σ (−1)^{|q|} dq dp, and ι_Q ω = dS holds for Q = (S, ·).

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::algebra::{sign, AlgebraError, Context, Generator, SuperPoly};
use crate::cartan::{is_cohomological, CartanError, FormSpace, VectorField};
use crate::scalar::{Gauss, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BvError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("pair ({q}, {p}) must have opposite parity")]
    PairParity { q: String, p: String },
    #[error("pair ({q}, {p}) has ghost numbers summing to {sum}, expected {expected}")]
    PairGhost { q: String, p: String, sum: i32, expected: i32 },
    #[error("generator `{0}` occurs in more than one pair")]
    Repeated(String),
    #[error("structure entry ({0}, {1}) violates graded antisymmetry")]
    Antisymmetry(String, String),
    #[error("structure entry ({0}, {1}) has the wrong ghost degree")]
    EntryDegree(String, String),
    #[error("element is not homogeneous in ghost number")]
    Inhomogeneous,
    #[error("expected {expected}, got ghost number {found:?} and parity {parity:?}")]
    WrongDegree { expected: &'static str, found: Option<i32>, parity: Option<u8> },
}

/// A constant-coefficient bracket {f,g} = Σ f←∂_i M^{ij} ∂_j g of degree k.
#[derive(Clone, Debug)]
pub struct GradedPoisson {
    ctx: Context,
    degree: i32,
    entries: BTreeMap<(usize, usize), Scalar>,
}

/// The entry M^{ji} forced by M^{ij} = m under graded antisymmetry.
fn partner(ctx: &Context, k: i32, i: usize, j: usize, m: &Scalar) -> Scalar {
    let a = (ctx.generator(i).gh + k) as i64;
    let b = (ctx.generator(j).gh + k) as i64;
    -&(m * &sign(a * b))
}

impl GradedPoisson {
    pub fn new(
        ctx: &Context,
        degree: i32,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self, BvError> {
        let mut map = BTreeMap::new();
        for (i, j, m) in entries {
            if m.is_zero() {
                continue;
            }
            let (gi, gj) = (ctx.generator(i), ctx.generator(j));
            if gi.gh + gj.gh != -degree {
                return Err(BvError::EntryDegree(gi.name.clone(), gj.name.clone()));
            }
            map.insert((i, j), m);
        }
        for ((i, j), m) in &map {
            let want = partner(ctx, degree, *i, *j, m);
            if map.get(&(*j, *i)) != Some(&want) {
                return Err(BvError::Antisymmetry(
                    ctx.generator(*i).name.clone(),
                    ctx.generator(*j).name.clone(),
                ));
            }
        }
        Ok(GradedPoisson { ctx: ctx.clone(), degree, entries: map })
    }

    /// Darboux bracket with {a, b} = 1 for each listed pair and the partner entry forced.
    pub fn darboux(ctx: &Context, degree: i32, pairs: &[(usize, usize)]) -> Result<Self, BvError> {
        let mut e = Vec::new();
        for &(a, b) in pairs {
            let one = Scalar::one();
            e.push((b, a, partner(ctx, degree, a, b, &one)));
            e.push((a, b, one));
        }
        GradedPoisson::new(ctx, degree, e)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|((i, j), m)| (*i, *j, m))
    }

    pub fn bracket(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, BvError> {
        self.ctx.same_as(f.context())?;
        self.ctx.same_as(g.context())?;
        let mut out = SuperPoly::zero(&self.ctx);
        for ((i, j), m) in &self.entries {
            let a = f.right_derive(*i);
            if a.is_zero() {
                continue;
            }
            let b = g.left_derive(*j);
            if b.is_zero() {
                continue;
            }
            out = &out + &(&a * &b).scale(m);
        }
        Ok(out)
    }

    /// The field {S, ·}, with components {S, z}.
    pub fn bracket_field(&self, s: &SuperPoly) -> Result<VectorField, BvError> {
        if s.is_zero() {
            return Ok(VectorField::zero(&self.ctx, self.degree));
        }
        let gh = s.ghost_number().ok_or(BvError::Inhomogeneous)?;
        let mut comps = Vec::new();
        for z in 0..self.ctx.len() {
            let c = self.bracket(s, &SuperPoly::gen(&self.ctx, z))?;
            if !c.is_zero() {
                comps.push((z, c));
            }
        }
        Ok(VectorField::new(&self.ctx, gh + self.degree, comps)?)
    }

    /// {f,{g,h}} − {{f,g},h} − (−1)^{(|f|+k)(|g|+k)} {g,{f,h}} on homogeneous f, g.
    pub fn jacobi_residual(&self, f: &SuperPoly, g: &SuperPoly, h: &SuperPoly) -> Result<SuperPoly, BvError> {
        let pf = f.parity().ok_or(BvError::Inhomogeneous)? as i64;
        let pg = g.parity().ok_or(BvError::Inhomogeneous)? as i64;
        let k = self.degree as i64;
        let lhs = self.bracket(f, &self.bracket(g, h)?)?;
        let a = self.bracket(&self.bracket(f, g)?, h)?;
        let b = self.bracket(g, &self.bracket(f, h)?)?;
        Ok(&(&lhs - &a) - &b.scale(&sign((pf + k) * (pg + k))))
    }

    /// {f,g} + (−1)^{(|f|+k)(|g|+k)} {g,f} on homogeneous f, g.
    pub fn antisymmetry_residual(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, BvError> {
        let pf = f.parity().ok_or(BvError::Inhomogeneous)? as i64;
        let pg = g.parity().ok_or(BvError::Inhomogeneous)? as i64;
        let k = self.degree as i64;
        Ok(&self.bracket(f, g)? + &self.bracket(g, f)?.scale(&sign((pf + k) * (pg + k))))
    }
}

/// An odd symplectic space in Darboux coordinates, possibly with extra
/// unpaired generators (parameters) that the operators treat as constants.
#[derive(Clone, Debug)]
pub struct BVSpace {
    ctx: Context,
    pairs: Vec<(usize, usize)>,
    poisson: GradedPoisson,
}

/// Field specification (q name, gh(q), p name); gh(p) = −1 − gh(q).
pub type PairSpec<'a> = (&'a str, i32, &'a str);

impl BVSpace {
    pub fn new(ctx: &Context, pairs: Vec<(usize, usize)>) -> Result<Self, BvError> {
        let mut seen = HashSet::new();
        for &(q, p) in &pairs {
            let (gq, gp) = (ctx.generator(q), ctx.generator(p));
            for g in [gq, gp] {
                if !seen.insert(g.name.clone()) {
                    return Err(BvError::Repeated(g.name.clone()));
                }
            }
            if gq.parity() == gp.parity() {
                return Err(BvError::PairParity { q: gq.name.clone(), p: gp.name.clone() });
            }
            if gq.gh + gp.gh != -1 {
                return Err(BvError::PairGhost {
                    q: gq.name.clone(),
                    p: gp.name.clone(),
                    sum: gq.gh + gp.gh,
                    expected: -1,
                });
            }
        }
        let poisson = GradedPoisson::darboux(ctx, 1, &pairs)?;
        Ok(BVSpace { ctx: ctx.clone(), pairs, poisson })
    }

    /// Context with generators q₁, p₁, q₂, p₂, … followed by the parameters.
    pub fn build(name: &str, fields: &[PairSpec], params: &[(&str, i32)]) -> Result<Self, BvError> {
        let mut gens = Vec::new();
        for (q, gh, p) in fields {
            gens.push(Generator::new(*q, *gh));
            gens.push(Generator::new(*p, -1 - gh));
        }
        for (n, gh) in params {
            gens.push(Generator::new(*n, *gh));
        }
        let ctx = Context::new(name, gens)?;
        let pairs = (0..fields.len()).map(|i| (2 * i, 2 * i + 1)).collect();
        BVSpace::new(&ctx, pairs)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn poisson(&self) -> &GradedPoisson {
        &self.poisson
    }

    pub fn q_vars(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn p_vars(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn laplacian(&self, f: &SuperPoly) -> Result<SuperPoly, BvError> {
        self.ctx.same_as(f.context())?;
        let mut out = SuperPoly::zero(&self.ctx);
        for &(q, p) in &self.pairs {
            let t = f.left_derive(p).left_derive(q);
            if t.is_zero() {
                continue;
            }
            out = if self.ctx.is_odd(q) { &out - &t } else { &out + &t };
        }
        Ok(out)
    }

    pub fn antibracket(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, BvError> {
        self.poisson.bracket(f, g)
    }

    /// Sign σ(f) in Δ(fg) = Δf·g + (−1)^{|f|} fΔg + σ(f)·(f,g); equals (−1)^{|f|}.
    pub fn leibniz_sign(f_parity: u8) -> Scalar {
        sign(f_parity as i64)
    }

    /// Δ(fg) − Δf·g − (−1)^{|f|} fΔg − σ(f)(f,g), decomposing f by parity.
    pub fn leibniz_residual(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly, BvError> {
        let mut out = self.laplacian(&(f * g))?;
        for (par, fp) in f.parity_components().iter().enumerate() {
            if fp.is_zero() {
                continue;
            }
            let s = sign(par as i64);
            let t1 = &self.laplacian(fp)? * g;
            let t2 = (fp * &self.laplacian(g)?).scale(&s);
            let t3 = self.antibracket(fp, g)?.scale(&BVSpace::leibniz_sign(par as u8));
            out = &(&(&out - &t1) - &t2) - &t3;
        }
        Ok(out)
    }

    /// Q = (S, ·); requires S even of ghost number 0.
    pub fn hamiltonian_vf(&self, s: &SuperPoly) -> Result<VectorField, BvError> {
        if s.is_zero() {
            return Ok(VectorField::zero(&self.ctx, 1));
        }
        if s.parity() != Some(0) || s.ghost_number() != Some(0) {
            return Err(BvError::WrongDegree {
                expected: "even action of ghost number 0",
                found: s.ghost_number(),
                parity: s.parity(),
            });
        }
        self.poisson.bracket_field(s)
    }

    /// ω = Σ (−1)^{|q|} dq dp on the doubled context.
    pub fn symplectic_form(&self, fs: &FormSpace) -> Result<SuperPoly, BvError> {
        self.ctx.same_as(fs.base())?;
        let mut w = SuperPoly::zero(fs.context());
        for &(q, p) in &self.pairs {
            let t = &fs.dgen(q) * &fs.dgen(p);
            w = if self.ctx.is_odd(q) { &w - &t } else { &w + &t };
        }
        Ok(w)
    }

    pub fn check_cme(&self, s: &SuperPoly) -> Result<CmeReport, BvError> {
        let r = self.antibracket(s, s)?;
        Ok(CmeReport { pass: r.is_zero(), residual: r })
    }

    /// ½(S,S) − iħΔS order by order in ħ.
    pub fn check_qme(&self, s: &SuperPoly) -> Result<QmeReport, BvError> {
        let half = Scalar::from_ratio(1, 2);
        let ih = Scalar::from_gauss(Gauss::i(), 1);
        let bb = self.antibracket(s, s)?;
        let lap = self.laplacian(s)?;
        let e = &bb.scale(&half) - &lap.scale(&ih);
        let mut residuals = BTreeMap::new();
        for k in e.hbar_orders() {
            residuals.insert(k, e.hbar_component(k));
        }
        let first = residuals.keys().next().copied();
        Ok(QmeReport {
            pass: e.is_zero(),
            first_failing_order: first,
            classical: bb.hbar_component(0).is_zero()
                && s.hbar_orders().iter().all(|&k| k >= 0),
            residuals,
            truncated: e.truncated(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CmeReport {
    pub pass: bool,
    pub residual: SuperPoly,
}

#[derive(Clone, Debug)]
pub struct QmeReport {
    pub pass: bool,
    pub first_failing_order: Option<i32>,
    /// Whether the ħ⁰ part of (S,S) vanishes.
    pub classical: bool,
    pub residuals: BTreeMap<i32, SuperPoly>,
    pub truncated: bool,
}

impl QmeReport {
    /// Whether every ħ-order up to and including `k` vanishes.
    pub fn passes_through(&self, k: i32) -> bool {
        self.first_failing_order.map_or(true, |f| f > k)
    }
}

/// Outcome of the relaxed BV checks for (ω, Q, S).
#[derive(Clone, Debug)]
pub struct RelaxedReport {
    /// Čα = ι_Q ω − dS.
    pub alpha: SuperPoly,
    /// Čω = dČα.
    pub curvature: SuperPoly,
    /// Čω + L_Q ω = 0.
    pub curvature_is_minus_lie: bool,
    /// L_Q Čω = 0.
    pub curvature_invariant: bool,
    /// ι_E ι_Q Čω with E the Euler field.
    pub euler_hamiltonian: SuperPoly,
    /// ι_Q Čω = d(ι_E ι_Q Čω).
    pub euler_is_hamiltonian: bool,
    /// ½ ι_Q ι_Q ω.
    pub half_iqiq: SuperPoly,
    /// For a supplied Š: ι_Qι_Qω = 2Š and the Euler recovery reproduces Š.
    pub candidate: Option<(bool, bool)>,
}

/// The Euler field Σ gh(z) z ∂_z.
pub fn euler_field(ctx: &Context) -> VectorField {
    let comps: Vec<(usize, SuperPoly)> = (0..ctx.len())
        .filter(|&z| ctx.generator(z).gh != 0)
        .map(|z| (z, SuperPoly::gen(ctx, z).scale_int(ctx.generator(z).gh as i64)))
        .collect();
    VectorField::new(ctx, 0, comps).expect("z has ghost number gh(z)")
}

pub fn relaxed_check_forms(
    fs: &FormSpace,
    omega: &SuperPoly,
    q: &VectorField,
    s: &SuperPoly,
    candidate: Option<&SuperPoly>,
) -> Result<RelaxedReport, BvError> {
    let check = is_cohomological(q)?;
    if !check.cohomological {
        let (generator, residual) = check.witness.expect("non-cohomological field has a witness");
        return Err(CartanError::NotCohomological { generator, residual: residual.to_string() }.into());
    }
    let sf = fs.function(s)?;
    let iq_omega = fs.contract(q, omega)?;
    let alpha = &iq_omega - &fs.d(&sf)?;
    let curvature = fs.d(&alpha)?;
    let lq_omega = fs.lie_derivative(q, omega)?;
    let curvature_is_minus_lie = (&curvature + &lq_omega).is_zero();
    let curvature_invariant = fs.lie_derivative(q, &curvature)?.is_zero();
    let e = euler_field(fs.base());
    let iq_curv = fs.contract(q, &curvature)?;
    let euler_hamiltonian = fs.contract(&e, &iq_curv)?;
    let euler_is_hamiltonian = iq_curv == fs.d(&euler_hamiltonian)?;
    let half_iqiq = fs.contract(q, &iq_omega)?.scale(&Scalar::from_ratio(1, 2));
    let candidate = match candidate {
        Some(c) => {
            let cf = fs.function(c)?;
            Some((half_iqiq == cf, euler_hamiltonian == cf))
        }
        None => None,
    };
    Ok(RelaxedReport {
        alpha,
        curvature,
        curvature_is_minus_lie,
        curvature_invariant,
        euler_hamiltonian,
        euler_is_hamiltonian,
        half_iqiq,
        candidate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp() -> BVSpace {
        BVSpace::build("qp", &[("q", 0, "p")], &[]).unwrap()
    }

    #[test]
    fn laplacian_and_bracket_examples() {
        let v = qp();
        let c = v.context();
        let q = SuperPoly::var(c, "q").unwrap();
        let p = SuperPoly::var(c, "p").unwrap();
        let s = &q * &p;
        assert_eq!(v.laplacian(&s).unwrap(), SuperPoly::one(c));
        assert!(v.laplacian(&SuperPoly::int(c, 3)).unwrap().is_zero());
        assert_eq!(v.antibracket(&q, &p).unwrap(), SuperPoly::one(c));
        assert!(v.antibracket(&s, &s).unwrap().is_zero());
        assert!(v.leibniz_residual(&q, &p).unwrap().is_zero());
        assert!(v.leibniz_residual(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn qme_example() {
        let v = qp();
        let c = v.context();
        let s = &SuperPoly::var(c, "q").unwrap() * &SuperPoly::var(c, "p").unwrap();
        let r = v.check_qme(&s).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_failing_order, Some(1));
        assert_eq!(r.residuals[&1], SuperPoly::constant(c, Scalar::from_gauss(-&Gauss::i(), 0)));
    }

    #[test]
    fn ghost_pair_bracket() {
        let c = Context::from_pairs("g", &[("b", -1), ("c", 1)]).unwrap();
        let p = GradedPoisson::darboux(&c, 0, &[(0, 1)]).unwrap();
        let b = SuperPoly::var(&c, "b").unwrap();
        let cc = SuperPoly::var(&c, "c").unwrap();
        assert_eq!(p.bracket(&b, &cc).unwrap(), SuperPoly::one(&c));
        assert_eq!(p.bracket(&cc, &b).unwrap(), SuperPoly::one(&c));
    }

    #[test]
    fn hamiltonian_field_contracts_to_ds() {
        let v = BVSpace::build("h", &[("x", 0, "xs"), ("c", 1, "cs")], &[]).unwrap();
        let ctx = v.context();
        let x = SuperPoly::var(ctx, "x").unwrap();
        let xs = SuperPoly::var(ctx, "xs").unwrap();
        let c = SuperPoly::var(ctx, "c").unwrap();
        let s = &(&xs * &c) * &x;
        let q = v.hamiltonian_vf(&s).unwrap();
        let fs = FormSpace::new(ctx).unwrap();
        let w = v.symplectic_form(&fs).unwrap();
        let lhs = fs.contract(&q, &w).unwrap();
        assert_eq!(lhs, fs.d(&fs.function(&s).unwrap()).unwrap());
        let r = relaxed_check_forms(&fs, &w, &q, &s, None);
        // x c xs: (S,S) = 0 here, so Q is cohomological
        let r = r.unwrap();
        assert!(r.alpha.is_zero() && r.curvature.is_zero());
    }
}
