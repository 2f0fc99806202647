//! Finite-dimensional slices of a polynomial algebra and exact solving of
//! linear operator equations on them.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{Context, Monomial, SuperPoly};
use crate::linalg::{Matrix, Q};
use crate::scalar::{Gauss, Scalar};

/// A real coordinate: monomial, ħ-power, and 0 for the real or 1 for the imaginary part.
pub type Coord = (Monomial, i32, u8);

/// Monomials in `vars` of total degree ≤ `max_degree`, optionally of fixed ghost number.
pub fn monomials(ctx: &Context, vars: &[usize], max_degree: u32, gh: Option<i32>) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Monomial::one(ctx.len());
    fn rec(
        ctx: &Context,
        vars: &[usize],
        k: usize,
        left: u32,
        cur: &mut Monomial,
        gh: Option<i32>,
        out: &mut Vec<Monomial>,
    ) {
        if k == vars.len() {
            let g: i32 = vars.iter().map(|&v| cur.0[v] as i32 * ctx.generator(v).gh).sum();
            if gh.map_or(true, |t| t == g) {
                out.push(cur.clone());
            }
            return;
        }
        let v = vars[k];
        let top = if ctx.is_odd(v) { left.min(1) } else { left };
        for e in 0..=top {
            cur.0[v] = e;
            rec(ctx, vars, k + 1, left - e, cur, gh, out);
        }
        cur.0[v] = 0;
    }
    rec(ctx, vars, 0, max_degree, &mut cur, gh, &mut out);
    out.sort();
    out
}

/// Real coordinates of a polynomial.
pub fn coordinates(p: &SuperPoly) -> BTreeMap<Coord, Q> {
    let mut out = BTreeMap::new();
    for (m, c) in p.terms() {
        for (k, g) in c.terms() {
            if !g.re.is_zero() {
                out.insert((m.clone(), k, 0), g.re.clone());
            }
            if !g.im.is_zero() {
                out.insert((m.clone(), k, 1), g.im.clone());
            }
        }
    }
    out
}

pub fn from_coordinate(ctx: &Context, key: &Coord, v: &Q) -> SuperPoly {
    let (m, k, part) = key;
    let g = if *part == 0 {
        Gauss::new(v.clone(), Q::zero())
    } else {
        Gauss::new(Q::zero(), v.clone())
    };
    SuperPoly::term(ctx, m.clone(), Scalar::from_gauss(g, *k))
}

/// A ℚ-basis of a slice of the algebra.
#[derive(Clone, Debug)]
pub struct Basis {
    ctx: Context,
    keys: Vec<Coord>,
}

impl Basis {
    /// Real, ħ-free multiples of the monomials.
    pub fn real(ctx: &Context, monos: &[Monomial]) -> Self {
        Basis { ctx: ctx.clone(), keys: monos.iter().map(|m| (m.clone(), 0, 0)).collect() }
    }

    /// All ħ-powers in `lo..=hi`, with complex coefficients when `complex`.
    pub fn full(ctx: &Context, monos: &[Monomial], lo: i32, hi: i32, complex: bool) -> Self {
        let mut keys = Vec::new();
        for m in monos {
            for k in lo..=hi {
                keys.push((m.clone(), k, 0));
                if complex {
                    keys.push((m.clone(), k, 1));
                }
            }
        }
        Basis { ctx: ctx.clone(), keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn element(&self, i: usize) -> SuperPoly {
        from_coordinate(&self.ctx, &self.keys[i], &Q::from_integer(1.into()))
    }

    pub fn combine(&self, x: &[Q]) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.ctx);
        for (key, v) in self.keys.iter().zip(x) {
            if !v.is_zero() {
                out = &out + &from_coordinate(&self.ctx, key, v);
            }
        }
        out
    }
}

/// Matrix of a ℚ-linear map on `domain`, with its row coordinates; extra
/// polynomials may register additional rows.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: Matrix,
    pub rows: Vec<Coord>,
}

pub fn operator_matrix<E>(
    domain: &Basis,
    extra: &[&SuperPoly],
    mut op: impl FnMut(&SuperPoly) -> Result<SuperPoly, E>,
) -> Result<OperatorMatrix, E> {
    let mut images = Vec::with_capacity(domain.len());
    let mut rows: BTreeMap<Coord, usize> = BTreeMap::new();
    for i in 0..domain.len() {
        let c = coordinates(&op(&domain.element(i))?);
        for k in c.keys() {
            let n = rows.len();
            rows.entry(k.clone()).or_insert(n);
        }
        images.push(c);
    }
    for p in extra {
        for k in coordinates(p).into_keys() {
            let n = rows.len();
            rows.entry(k).or_insert(n);
        }
    }
    let mut m = Matrix::zeros(rows.len(), domain.len());
    for (j, c) in images.iter().enumerate() {
        for (k, v) in c {
            m.set(rows[k], j, v.clone());
        }
    }
    let mut order = vec![None; rows.len()];
    for (k, i) in rows {
        order[i] = Some(k);
    }
    Ok(OperatorMatrix { matrix: m, rows: order.into_iter().map(|k| k.expect("dense")).collect() })
}

impl OperatorMatrix {
    pub fn vector(&self, p: &SuperPoly) -> Option<Vec<Q>> {
        let c = coordinates(p);
        let mut v = vec![Q::zero(); self.rows.len()];
        let index: BTreeMap<&Coord, usize> = self.rows.iter().enumerate().map(|(i, k)| (k, i)).collect();
        for (k, x) in c {
            v[*index.get(&k)?] = x;
        }
        Some(v)
    }
}

/// Outcome of solving op(x) = target on a finite slice.
#[derive(Clone, Debug)]
pub enum Solve {
    Solution { x: SuperPoly, kernel_dim: usize },
    /// y with yᵀA = 0 and yᵀb ≠ 0, over the listed row coordinates.
    Inconsistent { certificate: Vec<(Coord, Q)> },
}

pub fn solve_operator<E>(
    domain: &Basis,
    target: &SuperPoly,
    op: impl FnMut(&SuperPoly) -> Result<SuperPoly, E>,
) -> Result<Solve, E> {
    let om = operator_matrix(domain, &[target], op)?;
    let b = om.vector(target).expect("target rows registered");
    if om.rows.is_empty() {
        return Ok(Solve::Solution { x: SuperPoly::zero(&domain.ctx), kernel_dim: domain.len() });
    }
    match om.matrix.solve(&b) {
        Some(x) => {
            let kernel_dim = domain.len() - om.matrix.rank();
            Ok(Solve::Solution { x: domain.combine(&x), kernel_dim })
        }
        None => {
            let y = om.matrix.inconsistency_certificate(&b).expect("inconsistent system has a certificate");
            let certificate = om
                .rows
                .iter()
                .cloned()
                .zip(y)
                .filter(|(_, v)| !v.is_zero())
                .collect();
            Ok(Solve::Inconsistent { certificate })
        }
    }
}
