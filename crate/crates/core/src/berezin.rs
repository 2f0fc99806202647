//! Berezin integration over odd variables and normalized Gaussian expectation
//! over even variables.
//!
//! Convention: ∫ θ¹⋯θⁿ dθ¹⋯dθⁿ = 1. The integral over the ordered list
//! `[θ¹, …, θⁿ]` peels θⁿ first with a right derivative, then θⁿ⁻¹, and so
//! on. Iterating single-variable integrals `[θ¹]` then `[θ²]` is therefore
//! the integral over `[θ², θ¹]`, which differs from `[θ¹, θ²]` by the sign
//! of the reversing permutation.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Context, Monomial, SuperPoly};
use crate::linalg::{Matrix, Q};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BerezinError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("`{0}` is even and cannot be Berezin-integrated")]
    NotOdd(String),
    #[error("`{0}` is odd and cannot carry a Gaussian weight")]
    NotEven(String),
    #[error("variable `{0}` listed twice")]
    Duplicate(String),
    #[error("variable `{0}` appears in both the odd and the Gaussian block")]
    Overlap(String),
    #[error("covariance must be {0}×{0}")]
    CovarianceShape(usize),
    #[error("covariance is not symmetric")]
    NotSymmetric,
    #[error("covariance is not positive definite (leading minor {0} ≤ 0)")]
    NotPositiveDefinite(usize),
}

fn check_distinct(ctx: &Context, vars: &[usize]) -> Result<(), BerezinError> {
    for (k, &v) in vars.iter().enumerate() {
        if vars[..k].contains(&v) {
            return Err(BerezinError::Duplicate(ctx.generator(v).name.clone()));
        }
    }
    Ok(())
}

/// ∫ f dθ¹⋯dθⁿ over the listed odd generators.
pub fn berezin_integrate(f: &SuperPoly, odd_vars: &[usize]) -> Result<SuperPoly, BerezinError> {
    let ctx = f.context();
    check_distinct(ctx, odd_vars)?;
    for &v in odd_vars {
        if !ctx.is_odd(v) {
            return Err(BerezinError::NotOdd(ctx.generator(v).name.clone()));
        }
    }
    let mut g = f.clone();
    for &v in odd_vars.iter().rev() {
        g = g.right_derive(v);
    }
    Ok(g)
}

pub fn berezin_integrate_by(f: &SuperPoly, names: &[&str]) -> Result<SuperPoly, BerezinError> {
    let idx = names.iter().map(|n| f.context().index_of(n)).collect::<Result<Vec<_>, _>>()?;
    berezin_integrate(f, &idx)
}

/// A centered Gaussian on a block of even generators, normalized so ⟨1⟩ = 1.
#[derive(Clone, Debug)]
pub struct GaussianWeight {
    vars: Vec<usize>,
    cov: Matrix,
}

impl GaussianWeight {
    pub fn new(ctx: &Context, vars: Vec<usize>, cov: Matrix) -> Result<Self, BerezinError> {
        check_distinct(ctx, &vars)?;
        for &v in &vars {
            if ctx.is_odd(v) {
                return Err(BerezinError::NotEven(ctx.generator(v).name.clone()));
            }
        }
        let n = vars.len();
        if cov.rows != n || cov.cols != n {
            return Err(BerezinError::CovarianceShape(n));
        }
        if cov.transpose() != cov {
            return Err(BerezinError::NotSymmetric);
        }
        for k in 1..=n {
            let minor = Matrix::from_rows((0..k).map(|i| (0..k).map(|j| cov.get(i, j).clone()).collect()).collect());
            if !minor.det().is_positive() {
                return Err(BerezinError::NotPositiveDefinite(k));
            }
        }
        Ok(GaussianWeight { vars, cov })
    }

    pub fn by_names(ctx: &Context, names: &[&str], cov: Matrix) -> Result<Self, BerezinError> {
        let vars = names.iter().map(|n| ctx.index_of(n)).collect::<Result<Vec<_>, _>>()?;
        GaussianWeight::new(ctx, vars, cov)
    }

    /// Identity covariance.
    pub fn standard(ctx: &Context, vars: Vec<usize>) -> Result<Self, BerezinError> {
        let n = vars.len();
        GaussianWeight::new(ctx, vars, Matrix::identity(n))
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn covariance(&self) -> &Matrix {
        &self.cov
    }

    /// The moment ⟨Π x_k^{e_k}⟩, by Isserlis recursion.
    pub fn moment(&self, exps: &[u32]) -> Q {
        let mut memo = HashMap::new();
        self.moment_memo(exps.to_vec(), &mut memo)
    }

    fn moment_memo(&self, mut e: Vec<u32>, memo: &mut HashMap<Vec<u32>, Q>) -> Q {
        let total: u32 = e.iter().sum();
        if total == 0 {
            return Q::from_integer(1.into());
        }
        if total % 2 == 1 {
            return Q::zero();
        }
        if let Some(v) = memo.get(&e) {
            return v.clone();
        }
        let key = e.clone();
        let i = e.iter().position(|&x| x > 0).expect("nonzero total");
        e[i] -= 1;
        let mut acc = Q::zero();
        for j in 0..e.len() {
            if e[j] == 0 || self.cov.get(i, j).is_zero() {
                continue;
            }
            let mut r = e.clone();
            r[j] -= 1;
            let m = self.moment_memo(r, memo);
            acc += self.cov.get(i, j) * &m * Q::from_integer(e[j].into());
        }
        memo.insert(key, acc.clone());
        acc
    }
}

/// ⟨f⟩ over the weight's variables; all other generators pass through.
pub fn gaussian_expect(f: &SuperPoly, w: &GaussianWeight) -> Result<SuperPoly, BerezinError> {
    let ctx = f.context();
    let mut out = SuperPoly::zero(ctx);
    out.mark_truncated(f.truncated());
    let mut memo = HashMap::new();
    for (m, c) in f.terms() {
        let exps: Vec<u32> = w.vars.iter().map(|&v| m.exp(v)).collect();
        let val = w.moment_memo(exps, &mut memo);
        if val.is_zero() {
            continue;
        }
        let mut rest = m.0.clone();
        for &v in &w.vars {
            rest[v] = 0;
        }
        // even generators commute with everything, so no sign is incurred
        out.add_term(Monomial(rest), c.scale_rational(&val));
    }
    Ok(out)
}

/// Berezin integral over `odd_vars` followed by the Gaussian expectation.
pub fn bv_measure_integrate(
    f: &SuperPoly,
    odd_vars: &[usize],
    w: Option<&GaussianWeight>,
) -> Result<SuperPoly, BerezinError> {
    if let Some(w) = w {
        if let Some(v) = odd_vars.iter().find(|v| w.vars.contains(v)) {
            return Err(BerezinError::Overlap(f.context().generator(*v).name.clone()));
        }
    }
    let g = berezin_integrate(f, odd_vars)?;
    match w {
        Some(w) => gaussian_expect(&g, w),
        None => Ok(g),
    }
}

/// The scalar value of a constant result, if it is one.
pub fn as_constant(f: &SuperPoly) -> Option<Scalar> {
    f.is_constant().then(|| f.constant_term())
}
