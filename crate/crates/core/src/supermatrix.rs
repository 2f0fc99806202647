//! Even block supermatrices over a Grassmann-type algebra and the Berezinian.

use thiserror::Error;

use crate::algebra::{AlgebraError, Context, SuperPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuperMatrixError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("block {block} has shape {found:?}, expected {expected:?}")]
    Shape { block: &'static str, expected: (usize, usize), found: (usize, usize) },
    #[error("entry {block}[{row}][{col}] must be {expected}")]
    Parity { block: &'static str, row: usize, col: usize, expected: &'static str },
    #[error("block {0} has singular body")]
    SingularBody(&'static str),
    #[error("orders differ: ({0},{1}) vs ({2},{3})")]
    OrderMismatch(usize, usize, usize, usize),
    #[error("element is not invertible: {0}")]
    NotUnit(String),
}

/// A square matrix of polynomials.
pub type PolyMatrix = Vec<Vec<SuperPoly>>;

fn zeros(ctx: &Context, r: usize, c: usize) -> PolyMatrix {
    vec![vec![SuperPoly::zero(ctx); c]; r]
}

fn ident(ctx: &Context, n: usize) -> PolyMatrix {
    let mut m = zeros(ctx, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = SuperPoly::one(ctx);
    }
    m
}

pub fn mat_mul(ctx: &Context, a: &PolyMatrix, b: &PolyMatrix, inner: usize) -> PolyMatrix {
    let r = a.len();
    let c = b.first().map(|x| x.len()).unwrap_or(0);
    let mut out = zeros(ctx, r, c);
    for i in 0..r {
        for j in 0..c {
            let mut s = SuperPoly::zero(ctx);
            for k in 0..inner {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    continue;
                }
                s = &s + &(&a[i][k] * &b[k][j]);
            }
            out[i][j] = s;
        }
    }
    out
}

/// Sum of two matrices; a product through an empty inner dimension comes back
/// with empty rows and counts as zero.
fn mat_add(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| match (r.is_empty(), s.is_empty()) {
            (true, _) => s.clone(),
            (_, true) => r.clone(),
            _ => r.iter().zip(s).map(|(x, y)| x + y).collect(),
        })
        .collect()
}

fn mat_neg(a: &PolyMatrix) -> PolyMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Inverse of an even element c + n with c an invertible scalar and n nilpotent.
pub fn unit_inverse(u: &SuperPoly) -> Result<SuperPoly, SuperMatrixError> {
    let ctx = u.context();
    let body = u.body();
    if !body.is_constant() || body.is_zero() {
        return Err(SuperMatrixError::NotUnit(u.to_string()));
    }
    let c = body.constant_term();
    let (cinv, cut) = c.inverse(ctx.window()).ok_or_else(|| SuperMatrixError::NotUnit(u.to_string()))?;
    let n = u - &SuperPoly::constant(ctx, c);
    let x = n.scale(&-&cinv);
    let mut acc = SuperPoly::one(ctx);
    let mut pw = SuperPoly::one(ctx);
    loop {
        pw = &pw * &x;
        if pw.is_zero() {
            break;
        }
        acc = &acc + &pw;
    }
    let mut out = acc.scale(&cinv);
    out.mark_truncated(cut);
    Ok(out)
}

fn is_unit(u: &SuperPoly) -> bool {
    let b = u.body();
    b.is_constant() && !b.is_zero()
}

/// Determinant of a matrix with even (hence mutually commuting) entries,
/// by elimination on unit pivots with a cofactor fallback.
pub fn det_even(ctx: &Context, m: &PolyMatrix) -> SuperPoly {
    let n = m.len();
    if n == 0 {
        return SuperPoly::one(ctx);
    }
    let mut a = m.clone();
    let mut det = SuperPoly::one(ctx);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| is_unit(&a[i][c])) else {
            if (c..n).all(|i| a[i][c].is_zero()) {
                return SuperPoly::zero(ctx);
            }
            let rest: PolyMatrix = a[c..].iter().map(|r| r[c..].to_vec()).collect();
            return &det * &det_cofactor(ctx, &rest);
        };
        if p != c {
            a.swap(p, c);
            det = -&det;
        }
        let piv = a[c][c].clone();
        let inv = unit_inverse(&piv).expect("pivot is a unit");
        det = &det * &piv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[i][j] - &(&f * &a[c][j]);
                a[i][j] = v;
            }
        }
    }
    det
}

/// Laplace expansion along the first row (entries assumed even).
pub fn det_cofactor(ctx: &Context, m: &PolyMatrix) -> SuperPoly {
    let n = m.len();
    if n == 0 {
        return SuperPoly::one(ctx);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = SuperPoly::zero(ctx);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: PolyMatrix =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = &m[0][j] * &det_cofactor(ctx, &minor);
        out = if j % 2 == 0 { &out + &t } else { &out - &t };
    }
    out
}

/// Inverse of an even-entry matrix whose determinant is a unit.
pub fn inverse_even(ctx: &Context, m: &PolyMatrix) -> Result<PolyMatrix, SuperMatrixError> {
    let n = m.len();
    let det = det_even(ctx, m);
    let dinv = unit_inverse(&det)?;
    let mut inv = zeros(ctx, n, n);
    for i in 0..n {
        for j in 0..n {
            // adjugate entry (i,j) = (−1)^{i+j} det(minor without row j, col i)
            let minor: PolyMatrix = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, x)| x.clone()).collect())
                .collect();
            let cof = det_even(ctx, &minor);
            let v = &cof * &dinv;
            inv[i][j] = if (i + j) % 2 == 0 { v } else { -&v };
        }
    }
    Ok(inv)
}

/// X = (A B; C D), with A (p×p), D (q×q) even and B, C odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperMatrix {
    ctx: Context,
    p: usize,
    q: usize,
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub c: PolyMatrix,
    pub d: PolyMatrix,
}

fn check_block(
    name: &'static str,
    m: &PolyMatrix,
    shape: (usize, usize),
    parity: u8,
    ctx: &Context,
) -> Result<(), SuperMatrixError> {
    let found = (m.len(), m.first().map(|r| r.len()).unwrap_or(shape.1));
    if found != shape || m.iter().any(|r| r.len() != shape.1) {
        return Err(SuperMatrixError::Shape { block: name, expected: shape, found });
    }
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            ctx.same_as(e.context())?;
            if !e.is_zero() && e.parity() != Some(parity) {
                return Err(SuperMatrixError::Parity {
                    block: name,
                    row: i,
                    col: j,
                    expected: if parity == 0 { "even" } else { "odd" },
                });
            }
        }
    }
    Ok(())
}

impl SuperMatrix {
    pub fn new(
        ctx: &Context,
        p: usize,
        q: usize,
        a: PolyMatrix,
        b: PolyMatrix,
        c: PolyMatrix,
        d: PolyMatrix,
    ) -> Result<Self, SuperMatrixError> {
        check_block("A", &a, (p, p), 0, ctx)?;
        check_block("B", &b, (p, q), 1, ctx)?;
        check_block("C", &c, (q, p), 1, ctx)?;
        check_block("D", &d, (q, q), 0, ctx)?;
        let fix = |m: PolyMatrix, r: usize, cc: usize| if m.is_empty() { zeros(ctx, r, cc) } else { m };
        Ok(SuperMatrix { ctx: ctx.clone(), p, q, a: fix(a, p, p), b: fix(b, p, q), c: fix(c, q, p), d: fix(d, q, q) })
    }

    pub fn identity(ctx: &Context, p: usize, q: usize) -> Self {
        SuperMatrix {
            ctx: ctx.clone(),
            p,
            q,
            a: ident(ctx, p),
            b: zeros(ctx, p, q),
            c: zeros(ctx, q, p),
            d: ident(ctx, q),
        }
    }

    pub fn order(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn mul(&self, o: &SuperMatrix) -> Result<SuperMatrix, SuperMatrixError> {
        if self.order() != o.order() {
            return Err(SuperMatrixError::OrderMismatch(self.p, self.q, o.p, o.q));
        }
        self.ctx.same_as(&o.ctx)?;
        let (p, q, ctx) = (self.p, self.q, &self.ctx);
        Ok(SuperMatrix {
            ctx: ctx.clone(),
            p,
            q,
            a: mat_add(&mat_mul(ctx, &self.a, &o.a, p), &mat_mul(ctx, &self.b, &o.c, q)),
            b: mat_add(&mat_mul(ctx, &self.a, &o.b, p), &mat_mul(ctx, &self.b, &o.d, q)),
            c: mat_add(&mat_mul(ctx, &self.c, &o.a, p), &mat_mul(ctx, &self.d, &o.c, q)),
            d: mat_add(&mat_mul(ctx, &self.c, &o.b, p), &mat_mul(ctx, &self.d, &o.d, q)),
        })
    }

    fn body_det_unit(&self, m: &PolyMatrix) -> bool {
        let body: PolyMatrix = m.iter().map(|r| r.iter().map(|x| x.body()).collect()).collect();
        is_unit(&det_even(&self.ctx, &body))
    }

    /// Invertible iff the bodies of A and D are invertible.
    pub fn is_invertible(&self) -> bool {
        self.body_det_unit(&self.a) && self.body_det_unit(&self.d)
    }

    fn require_invertible(&self) -> Result<(), SuperMatrixError> {
        if !self.body_det_unit(&self.a) {
            return Err(SuperMatrixError::SingularBody("A"));
        }
        if !self.body_det_unit(&self.d) {
            return Err(SuperMatrixError::SingularBody("D"));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<SuperMatrix, SuperMatrixError> {
        self.require_invertible()?;
        let (p, q, ctx) = (self.p, self.q, &self.ctx);
        if p == 0 || q == 0 {
            let mut out = self.clone();
            out.a = inverse_even(ctx, &self.a)?;
            out.d = inverse_even(ctx, &self.d)?;
            return Ok(out);
        }
        let ainv = inverse_even(ctx, &self.a)?;
        let dinv = inverse_even(ctx, &self.d)?;
        // Schur complements
        let sa = mat_add(&self.a, &mat_neg(&mat_mul(ctx, &mat_mul(ctx, &self.b, &dinv, q), &self.c, q)));
        let sd = mat_add(&self.d, &mat_neg(&mat_mul(ctx, &mat_mul(ctx, &self.c, &ainv, p), &self.b, p)));
        let sainv = inverse_even(ctx, &sa)?;
        let sdinv = inverse_even(ctx, &sd)?;
        let b = mat_neg(&mat_mul(ctx, &mat_mul(ctx, &ainv, &self.b, p), &sdinv, q));
        let c = mat_neg(&mat_mul(ctx, &mat_mul(ctx, &dinv, &self.c, q), &sainv, p));
        Ok(SuperMatrix { ctx: ctx.clone(), p, q, a: sainv, b, c, d: sdinv })
    }

    /// Ber(X) = det(A − B D⁻¹ C) / det(D).
    pub fn berezinian(&self) -> Result<SuperPoly, SuperMatrixError> {
        self.require_invertible()?;
        let (q, ctx) = (self.q, &self.ctx);
        if q == 0 {
            return Ok(det_even(ctx, &self.a));
        }
        let dinv = inverse_even(ctx, &self.d)?;
        let sa = mat_add(&self.a, &mat_neg(&mat_mul(ctx, &mat_mul(ctx, &self.b, &dinv, q), &self.c, q)));
        let num = det_even(ctx, &sa);
        let den = unit_inverse(&det_even(ctx, &self.d))?;
        Ok(&num * &den)
    }
}

/// Ber(XY) − Ber(X)·Ber(Y), with a flag for exact vanishing.
pub fn check_multiplicative(
    x: &SuperMatrix,
    y: &SuperMatrix,
) -> Result<(bool, SuperPoly), SuperMatrixError> {
    let xy = x.mul(y)?;
    let lhs = xy.berezinian()?;
    let rhs = &x.berezinian()? * &y.berezinian()?;
    let r = &lhs - &rhs;
    Ok((r.is_zero(), r))
}
