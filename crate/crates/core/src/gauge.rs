//! Gauge fixing on graph Lagrangians p = ∂Ψ/∂q, BV integration, fiber
//! pushforward, and checks of the BV theorem.
//!
//! Even q's are integrated against a normalized Gaussian μ. On such a block
//! the Laplacian that integrates to zero is the weighted one
//! Δ_μ g = Δg − Σ_x (Σ⁻¹x)_x ∂_{p_x} g, which reduces to Δ when no even q is
//! integrated.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::algebra::{AlgebraError, SuperPoly};
use crate::berezin::{bv_measure_integrate, BerezinError, GaussianWeight};
use crate::bv::{BVSpace, BvError};
use crate::linalg::Matrix;
use crate::polyspace::{monomials, solve_operator, Basis, Solve};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaugeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Bv(#[from] BvError),
    #[error(transparent)]
    Berezin(#[from] BerezinError),
    #[error("gauge fermion depends on the momentum `{0}`")]
    DependsOnMomentum(String),
    #[error("gauge fermion must be odd of ghost number −1")]
    FermionDegree,
    #[error("even field `{0}` is integrated but not covered by the Gaussian weight")]
    Uncovered(String),
    #[error("gauge fermion touches the retained variable `{0}`")]
    TouchesRetained(String),
    #[error("pair index {0} out of range")]
    BadPair(usize),
}

/// An odd function Ψ of ghost number −1 in the q's (and parameters).
#[derive(Clone, Debug)]
pub struct GaugeFermion {
    psi: SuperPoly,
}

impl GaugeFermion {
    pub fn new(space: &BVSpace, psi: SuperPoly) -> Result<Self, GaugeError> {
        space.context().same_as(psi.context())?;
        for p in space.p_vars() {
            if psi.mentions(p) {
                return Err(GaugeError::DependsOnMomentum(space.context().generator(p).name.clone()));
            }
        }
        if !psi.is_zero() && (psi.parity() != Some(1) || psi.ghost_number() != Some(-1)) {
            return Err(GaugeError::FermionDegree);
        }
        Ok(GaugeFermion { psi })
    }

    pub fn zero(space: &BVSpace) -> Self {
        GaugeFermion { psi: SuperPoly::zero(space.context()) }
    }

    pub fn poly(&self) -> &SuperPoly {
        &self.psi
    }
}

/// f with p_i ↦ ∂Ψ/∂q_i for the listed pairs.
pub fn restrict_pairs(
    f: &SuperPoly,
    psi: &GaugeFermion,
    space: &BVSpace,
    pairs: &[usize],
) -> Result<SuperPoly, GaugeError> {
    let mut b = Vec::new();
    for &k in pairs {
        let &(q, p) = space.pairs().get(k).ok_or(GaugeError::BadPair(k))?;
        b.push((p, psi.psi.left_derive(q)));
    }
    Ok(f.substitute(&b)?)
}

pub fn restrict(f: &SuperPoly, psi: &GaugeFermion, space: &BVSpace) -> Result<SuperPoly, GaugeError> {
    let all: Vec<usize> = (0..space.pairs().len()).collect();
    restrict_pairs(f, psi, space, &all)
}

/// Which integrated even fields carry which Gaussian weight.
fn measure_split(
    space: &BVSpace,
    pairs: &[usize],
    w: Option<&GaussianWeight>,
) -> Result<Vec<usize>, GaugeError> {
    let ctx = space.context();
    let mut odd = Vec::new();
    for &k in pairs {
        let q = space.pairs()[k].0;
        if ctx.is_odd(q) {
            odd.push(q);
        } else if !w.is_some_and(|w| w.vars().contains(&q)) {
            return Err(GaugeError::Uncovered(ctx.generator(q).name.clone()));
        }
    }
    Ok(odd)
}

/// ∫_{L_Ψ} f over all pairs.
pub fn bv_integrate(
    f: &SuperPoly,
    psi: &GaugeFermion,
    space: &BVSpace,
    w: Option<&GaussianWeight>,
) -> Result<SuperPoly, GaugeError> {
    let all: Vec<usize> = (0..space.pairs().len()).collect();
    integrate_pairs(f, psi, space, &all, w)
}

fn integrate_pairs(
    f: &SuperPoly,
    psi: &GaugeFermion,
    space: &BVSpace,
    pairs: &[usize],
    w: Option<&GaussianWeight>,
) -> Result<SuperPoly, GaugeError> {
    let odd = measure_split(space, pairs, w)?;
    let r = restrict_pairs(f, psi, space, pairs)?;
    Ok(bv_measure_integrate(&r, &odd, w)?)
}

/// Δ_μ: the Laplacian twisted by the Gaussian weight on even q's.
pub fn weighted_laplacian(
    space: &BVSpace,
    w: Option<&GaussianWeight>,
    g: &SuperPoly,
) -> Result<SuperPoly, GaugeError> {
    let mut out = space.laplacian(g)?;
    let Some(w) = w else { return Ok(out) };
    let ctx = space.context();
    let inv = w.covariance().inverse().expect("positive definite covariance");
    let partner: HashMap<usize, usize> = space.pairs().iter().map(|&(q, p)| (q, p)).collect();
    for (a, &x) in w.vars().iter().enumerate() {
        let Some(&px) = partner.get(&x) else { continue };
        let dg = g.left_derive(px);
        if dg.is_zero() {
            continue;
        }
        let mut coef = SuperPoly::zero(ctx);
        for (b, &y) in w.vars().iter().enumerate() {
            let m = inv.get(a, b).clone();
            coef = &coef + &SuperPoly::gen(ctx, y).scale(&Scalar::from_rational(m));
        }
        out = &out - &(&coef * &dg);
    }
    Ok(out)
}

/// Report of a BV theorem check over a family of gauge fermions.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub pass: bool,
    /// Hypothesis of the statement (Δf = 0 for gauge independence; always true for exactness).
    pub hypothesis: bool,
    pub values: Vec<SuperPoly>,
    /// Parameters that the symbolic value still depends on.
    pub dependent_parameters: Vec<String>,
}

/// ∫_{L_Ψ} Δ_μ g = 0 for every Ψ in the family.
pub fn check_thm_bv1(
    g: &SuperPoly,
    family: &[GaugeFermion],
    space: &BVSpace,
    w: Option<&GaussianWeight>,
) -> Result<TheoremReport, GaugeError> {
    let f = weighted_laplacian(space, w, g)?;
    let values = family.iter().map(|psi| bv_integrate(&f, psi, space, w)).collect::<Result<Vec<_>, _>>()?;
    Ok(TheoremReport {
        pass: values.iter().all(|v| v.is_zero()),
        hypothesis: true,
        values,
        dependent_parameters: Vec::new(),
    })
}

/// For Δ_μ f = 0 the integral agrees across the family and, with formal
/// coefficients, mentions none of the `params`.
pub fn check_thm_bv2(
    f: &SuperPoly,
    family: &[GaugeFermion],
    params: &[usize],
    space: &BVSpace,
    w: Option<&GaussianWeight>,
) -> Result<TheoremReport, GaugeError> {
    let hypothesis = weighted_laplacian(space, w, f)?.is_zero();
    let values = family.iter().map(|psi| bv_integrate(f, psi, space, w)).collect::<Result<Vec<_>, _>>()?;
    let ctx = space.context();
    let mut dependent = Vec::new();
    for &a in params {
        if values.iter().any(|v| v.mentions(a)) {
            dependent.push(ctx.generator(a).name.clone());
        }
    }
    let agree = values.windows(2).all(|p| p[0] == p[1]);
    Ok(TheoremReport { pass: hypothesis && agree && dependent.is_empty(), hypothesis, values, dependent_parameters: dependent })
}

/// A split of the pairs into retained (primed) and integrated (double-primed) blocks.
#[derive(Clone, Debug)]
pub struct FiberSplit {
    space: BVSpace,
    retained: BVSpace,
    integrated: Vec<usize>,
}

impl FiberSplit {
    pub fn new(space: &BVSpace, integrated: Vec<usize>) -> Result<Self, GaugeError> {
        if let Some(&k) = integrated.iter().find(|&&k| k >= space.pairs().len()) {
            return Err(GaugeError::BadPair(k));
        }
        let kept: Vec<(usize, usize)> = space
            .pairs()
            .iter()
            .enumerate()
            .filter(|(k, _)| !integrated.contains(k))
            .map(|(_, p)| *p)
            .collect();
        let retained = BVSpace::new(space.context(), kept)?;
        // the integrated block must itself be a valid BV space
        BVSpace::new(space.context(), integrated.iter().map(|&k| space.pairs()[k]).collect())?;
        Ok(FiberSplit { space: space.clone(), retained, integrated })
    }

    pub fn space(&self) -> &BVSpace {
        &self.space
    }

    /// The primed block, as a BV space on the same context.
    pub fn retained(&self) -> &BVSpace {
        &self.retained
    }

    pub fn integrated(&self) -> &[usize] {
        &self.integrated
    }

    fn retained_indices(&self) -> Vec<usize> {
        (0..self.space.pairs().len()).filter(|k| !self.integrated.contains(k)).collect()
    }

    /// Δ″ on the integrated block, twisted by its Gaussian weight.
    pub fn fiber_laplacian(&self, w: Option<&GaussianWeight>, g: &SuperPoly) -> Result<SuperPoly, GaugeError> {
        let fiber = BVSpace::new(
            self.space.context(),
            self.integrated.iter().map(|&k| self.space.pairs()[k]).collect(),
        )?;
        weighted_laplacian(&fiber, w, g)
    }

    /// Δ′ + Δ″_μ.
    pub fn total_laplacian(&self, w: Option<&GaussianWeight>, g: &SuperPoly) -> Result<SuperPoly, GaugeError> {
        Ok(&self.retained.laplacian(g)? + &self.fiber_laplacian(w, g)?)
    }
}

/// ∫_{L_Ψ″} f: restriction and integration over the double-primed block only.
pub fn bv_pushforward(
    f: &SuperPoly,
    psi: &GaugeFermion,
    split: &FiberSplit,
    w: Option<&GaussianWeight>,
) -> Result<SuperPoly, GaugeError> {
    let ctx = split.space.context();
    for &k in split.retained_indices().iter() {
        let (q, p) = split.space.pairs()[k];
        for v in [q, p] {
            if psi.psi.mentions(v) {
                return Err(GaugeError::TouchesRetained(ctx.generator(v).name.clone()));
            }
        }
    }
    integrate_pairs(f, psi, &split.space, &split.integrated, w)
}

/// Δ′(∫ f) − ∫ (Δ′ + Δ″_μ) f.
pub fn chain_map_residual(
    f: &SuperPoly,
    psi: &GaugeFermion,
    split: &FiberSplit,
    w: Option<&GaussianWeight>,
) -> Result<SuperPoly, GaugeError> {
    let lhs = split.retained.laplacian(&bv_pushforward(f, psi, split, w)?)?;
    let rhs = bv_pushforward(&split.total_laplacian(w, f)?, psi, split, w)?;
    Ok(&lhs - &rhs)
}

/// A primitive P with Δ′P = ∫_{Ψ₁} f − ∫_{Ψ₀} f, searched among retained
/// polynomials of degree ≤ `max_degree`.
#[derive(Clone, Debug)]
pub struct VariationPrimitive {
    pub difference: SuperPoly,
    pub primitive: Option<SuperPoly>,
}

pub fn pushforward_variation(
    f: &SuperPoly,
    psi0: &GaugeFermion,
    psi1: &GaugeFermion,
    split: &FiberSplit,
    w: Option<&GaussianWeight>,
    max_degree: u32,
) -> Result<VariationPrimitive, GaugeError> {
    let a = bv_pushforward(f, psi0, split, w)?;
    let b = bv_pushforward(f, psi1, split, w)?;
    let difference = &b - &a;
    if difference.is_zero() {
        return Ok(VariationPrimitive { difference, primitive: Some(SuperPoly::zero(split.space.context())) });
    }
    let ctx = split.space.context();
    let mut vars: Vec<usize> = Vec::new();
    for k in split.retained_indices() {
        let (q, p) = split.space.pairs()[k];
        vars.push(q);
        vars.push(p);
    }
    let gh = difference.ghost_number().map(|g| g - 1);
    // coefficients may involve parameters: solve coefficientwise in them
    let params: Vec<usize> = (0..ctx.len()).filter(|v| !vars.contains(v) && difference.mentions(*v)).collect();
    let mut by_param: BTreeMap<Vec<u32>, SuperPoly> = BTreeMap::new();
    for (m, c) in difference.terms() {
        let key: Vec<u32> = params.iter().map(|&v| m.exp(v)).collect();
        let mut rest = m.clone();
        for &v in &params {
            rest.0[v] = 0;
        }
        by_param.entry(key).or_insert_with(|| SuperPoly::zero(ctx)).add_term(rest, c.clone());
    }
    let mut total = SuperPoly::zero(ctx);
    let hb = difference.hbar_orders();
    let (lo, hi) = (hb.first().copied().unwrap_or(0), hb.last().copied().unwrap_or(0));
    for (key, part) in by_param {
        let g = gh.map(|g| g + params.iter().zip(&key).map(|(&v, &e)| -(e as i32) * ctx.generator(v).gh).sum::<i32>());
        let basis = Basis::full(ctx, &monomials(ctx, &vars, max_degree, g), lo, hi, true);
        match solve_operator(&basis, &part, |p| split.retained.laplacian(p))? {
            Solve::Solution { x, .. } => {
                let mut factor = crate::algebra::Monomial::one(ctx.len());
                for (&v, &e) in params.iter().zip(&key) {
                    factor.0[v] = e;
                }
                let mono = SuperPoly::term(ctx, factor, Scalar::one());
                // parameters are even, so they commute past Δ′
                total = &total + &(&mono * &x);
            }
            Solve::Inconsistent { .. } => return Ok(VariationPrimitive { difference, primitive: None }),
        }
    }
    Ok(VariationPrimitive { difference, primitive: Some(total) })
}

/// Weight with identity covariance on the named even q's.
pub fn standard_weight(space: &BVSpace, names: &[&str]) -> Result<GaussianWeight, GaugeError> {
    Ok(GaussianWeight::by_names(space.context(), names, Matrix::identity(names.len()))?)
}
