//! Hodge-type chain contractions of the interior complex and residual fields.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{ChainComplexModel, ModelError};
use crate::linalg::{Matrix, Q};

/// P and K on the interior complex with dK + Kd = 1 − P, K² = 0, KP = PK = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainContraction {
    /// Model indices of the interior cells, in matrix order.
    pub cells: Vec<usize>,
    pub degrees: Vec<u32>,
    pub d: Matrix,
    pub weights: Vec<Q>,
    pub projector: Matrix,
    pub homotopy: Matrix,
    /// Harmonic columns spanning the image of P, each homogeneous in degree.
    pub harmonic: Vec<Vec<Q>>,
}

pub fn interior_differential(cx: &ChainComplexModel) -> (Vec<usize>, Matrix) {
    let cells = cx.interior();
    let mut d = Matrix::zeros(cells.len(), cells.len());
    for (i, &t) in cells.iter().enumerate() {
        for (j, &s) in cells.iter().enumerate() {
            d.set(i, j, cx.coboundary().get(t, s).clone());
        }
    }
    (cells, d)
}

/// The contraction orthogonal for the standard cell inner product.
pub fn chain_contraction(cx: &ChainComplexModel) -> Result<ChainContraction, ModelError> {
    let n = cx.interior().len();
    ChainContraction::weighted(cx, &vec![Q::one(); n])
}

fn diag(w: &[Q]) -> Matrix {
    let mut m = Matrix::zeros(w.len(), w.len());
    for (i, x) in w.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}

impl ChainContraction {
    /// The contraction orthogonal for the inner product diag(weights) on interior cells.
    pub fn weighted(cx: &ChainComplexModel, weights: &[Q]) -> Result<ChainContraction, ModelError> {
        let (cells, d) = interior_differential(cx);
        let n = cells.len();
        if weights.len() != n || weights.iter().any(|w| w <= &Q::zero()) {
            return Err(ModelError::SideCondition("weights must be positive, one per interior cell"));
        }
        let degrees: Vec<u32> = cells.iter().map(|&c| cx.cells()[c].degree).collect();
        let w = diag(weights);
        let winv = diag(&weights.iter().map(|x| x.recip()).collect::<Vec<_>>());
        let dstar = winv.mul(&d.transpose()).mul(&w);
        let lap = d.mul(&dstar).add(&dstar.mul(&d));
        let mut harmonic = Vec::new();
        let mut top = degrees.iter().copied().max().unwrap_or(0);
        if n == 0 {
            top = 0;
        }
        for k in 0..=top {
            let idx: Vec<usize> = (0..n).filter(|&i| degrees[i] == k).collect();
            let mut block = Matrix::zeros(idx.len(), idx.len());
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    block.set(a, b, lap.get(i, j).clone());
                }
            }
            for v in block.nullspace() {
                let mut full = vec![Q::zero(); n];
                for (a, &i) in idx.iter().enumerate() {
                    full[i] = v[a].clone();
                }
                harmonic.push(full);
            }
        }
        let h = Matrix::from_cols(n, &harmonic);
        let projector = if harmonic.is_empty() {
            Matrix::zeros(n, n)
        } else {
            let gram = h.transpose().mul(&w).mul(&h).inverse().expect("Gram matrix of a positive form");
            h.mul(&gram).mul(&h.transpose()).mul(&w)
        };
        let green = lap
            .add(&projector)
            .inverse()
            .ok_or(ModelError::SideCondition("L + P is not invertible"))?
            .sub(&projector);
        let homotopy = dstar.mul(&green);
        let c = ChainContraction { cells, degrees, d, weights: weights.to_vec(), projector, homotopy, harmonic };
        c.verify()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn verify(&self) -> Result<(), ModelError> {
        let (d, k, p) = (&self.d, &self.homotopy, &self.projector);
        let n = self.len();
        if d.mul(k).add(&k.mul(d)) != Matrix::identity(n).sub(p) {
            return Err(ModelError::SideCondition("dK + Kd = 1 − P"));
        }
        if !k.mul(k).is_zero() {
            return Err(ModelError::SideCondition("K² = 0"));
        }
        if !k.mul(p).is_zero() || !p.mul(k).is_zero() {
            return Err(ModelError::SideCondition("KP = PK = 0"));
        }
        if p.mul(p) != *p {
            return Err(ModelError::SideCondition("P² = P"));
        }
        Ok(())
    }

    /// Representatives of the A-sector residual fields: P applied to `reference`, or the harmonic basis.
    pub fn representatives(&self, reference: Option<&[Vec<Q>]>) -> Vec<Vec<Q>> {
        match reference {
            Some(r) => r.iter().map(|v| self.projector.mul_vec(v)).collect(),
            None => self.harmonic.clone(),
        }
    }

    /// B-sector representatives dual to `reps`: W·H (HᵀWH)⁻¹, so that their pairing with `reps` is the identity.
    pub fn dual_representatives(&self, reps: &[Vec<Q>]) -> Result<Vec<Vec<Q>>, ModelError> {
        if reps.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.len();
        let h = Matrix::from_cols(n, reps);
        let w = diag(&self.weights);
        let gram = h
            .transpose()
            .mul(&w)
            .mul(&h)
            .inverse()
            .ok_or_else(|| ModelError::Degenerate("residual representatives are dependent".into()))?;
        let hb = w.mul(&h).mul(&gram);
        Ok((0..hb.cols).map(|j| hb.col(j)).collect())
    }

    /// Degree of a homogeneous interior cochain.
    pub fn degree_of(&self, v: &[Q]) -> Option<u32> {
        v.iter().position(|x| !x.is_zero()).map(|i| self.degrees[i])
    }
}

/// Residual-field dimensions per ghost number and per cell degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualDims {
    /// dim H^k of the interior complex, indexed by k.
    pub by_degree: Vec<usize>,
    /// A-sector: H^k placed in ghost number 1 − k.
    pub a_sector: BTreeMap<i32, usize>,
    /// B-sector: the transposed complex in degree k, ghost number k − 2.
    pub b_sector: BTreeMap<i32, usize>,
    /// Number of interior cells per degree.
    pub interior_cells: Vec<usize>,
}

impl ResidualDims {
    pub fn a_total(&self) -> usize {
        self.a_sector.values().sum()
    }

    pub fn b_total(&self) -> usize {
        self.b_sector.values().sum()
    }

    /// Σ(−1)^k dim H^k = Σ(−1)^k (number of interior k-cells).
    pub fn euler_consistent(&self) -> bool {
        let alt = |v: &[usize]| v.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>();
        alt(&self.by_degree) == alt(&self.interior_cells)
    }
}

pub fn residual_fields(cx: &ChainComplexModel) -> ResidualDims {
    let (cells, d) = interior_differential(cx);
    let degrees: Vec<u32> = cells.iter().map(|&c| cx.cells()[c].degree).collect();
    let top = cx.dimension() as usize;
    let block_rank = |from: u32, to: u32| {
        let rows: Vec<usize> = (0..cells.len()).filter(|&i| degrees[i] == to).collect();
        let cols: Vec<usize> = (0..cells.len()).filter(|&i| degrees[i] == from).collect();
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, d.get(i, j).clone());
            }
        }
        m.rank()
    };
    let mut by_degree = Vec::new();
    let mut interior_cells = Vec::new();
    let mut a_sector = BTreeMap::new();
    let mut b_sector = BTreeMap::new();
    for k in 0..=top as u32 {
        let nk = degrees.iter().filter(|&&x| x == k).count();
        let out = block_rank(k, k + 1);
        let inc = if k == 0 { 0 } else { block_rank(k - 1, k) };
        let h = nk - out - inc;
        by_degree.push(h);
        interior_cells.push(nk);
        if h > 0 {
            *a_sector.entry(1 - k as i32).or_insert(0) += h;
            *b_sector.entry(k as i32 - 2).or_insert(0) += h;
        }
    }
    ResidualDims { by_degree, a_sector, b_sector, interior_cells }
}
