//! Finite cochain complexes with marked boundary pieces.
//!
//! `d[τ][σ]` is the incidence of σ in the coboundary of τ's cochain, so
//! (dA)_τ = Σ_σ d[τ][σ] A_σ. The A-fixed boundary must be closed under faces
//! and the B-fixed boundary under cofaces (a subcomplex of the dual complex).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::linalg::{Matrix, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub degree: u32,
}

impl Cell {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Cell { name: name.into(), degree }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexModel {
    dimension: u32,
    cells: Vec<Cell>,
    d: Matrix,
    boundary_a: BTreeSet<usize>,
    boundary_b: BTreeSet<usize>,
}

/// A sparse incidence entry (τ, σ, value) by cell name.
pub type Incidence = (String, String, Q);

impl ChainComplexModel {
    pub fn new(
        dimension: u32,
        cells: Vec<Cell>,
        incidences: &[Incidence],
        boundary_a: &[&str],
        boundary_b: &[&str],
    ) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, c) in cells.iter().enumerate() {
            if c.degree > dimension {
                return Err(ModelError::CellDegree(c.name.clone(), c.degree));
            }
            if index.insert(c.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateCell(c.name.clone()));
            }
        }
        let find = |n: &str| index.get(n).copied().ok_or_else(|| ModelError::UnknownCell(n.to_string()));
        let n = cells.len();
        let mut d = Matrix::zeros(n, n);
        for (t, s, v) in incidences {
            let (ti, si) = (find(t)?, find(s)?);
            if cells[ti].degree != cells[si].degree + 1 {
                return Err(ModelError::IncidenceDegree(t.clone(), s.clone()));
            }
            let cur = d.get(ti, si) + v;
            d.set(ti, si, cur);
        }
        let boundary_a: BTreeSet<usize> = boundary_a.iter().map(|c| find(c)).collect::<Result<_, _>>()?;
        let boundary_b: BTreeSet<usize> = boundary_b.iter().map(|c| find(c)).collect::<Result<_, _>>()?;
        Self::from_parts(dimension, cells, d, boundary_a, boundary_b)
    }

    pub(crate) fn from_parts(
        dimension: u32,
        cells: Vec<Cell>,
        d: Matrix,
        boundary_a: BTreeSet<usize>,
        boundary_b: BTreeSet<usize>,
    ) -> Result<Self, ModelError> {
        let n = cells.len();
        if !d.mul(&d).is_zero() {
            return Err(ModelError::NotDifferential);
        }
        if let Some(&c) = boundary_a.intersection(&boundary_b).next() {
            return Err(ModelError::OverlappingBoundary(cells[c].name.clone()));
        }
        for &s in &boundary_a {
            for r in 0..n {
                if !d.get(s, r).is_zero() && !boundary_a.contains(&r) {
                    return Err(ModelError::NotFaceClosed(cells[s].name.clone(), cells[r].name.clone()));
                }
            }
        }
        for &s in &boundary_b {
            for t in 0..n {
                if !d.get(t, s).is_zero() && !boundary_b.contains(&t) {
                    return Err(ModelError::NotCofaceClosed(cells[s].name.clone(), cells[t].name.clone()));
                }
            }
        }
        Ok(ChainComplexModel { dimension, cells, d, boundary_a, boundary_b })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn coboundary(&self) -> &Matrix {
        &self.d
    }

    pub fn boundary_a(&self) -> &BTreeSet<usize> {
        &self.boundary_a
    }

    pub fn boundary_b(&self) -> &BTreeSet<usize> {
        &self.boundary_b
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_a.is_empty() && self.boundary_b.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ModelError> {
        self.cells
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| ModelError::UnknownCell(name.to_string()))
    }

    /// Cells outside both boundary pieces, in index order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|c| !self.boundary_a.contains(c) && !self.boundary_b.contains(c))
            .collect()
    }

    pub fn incidences(&self) -> Vec<Incidence> {
        let n = self.cells.len();
        let mut out = Vec::new();
        for t in 0..n {
            for s in 0..n {
                let v = self.d.get(t, s);
                if !v.is_zero() {
                    out.push((self.cells[t].name.clone(), self.cells[s].name.clone(), v.clone()));
                }
            }
        }
        out
    }

    fn names(&self, set: &BTreeSet<usize>) -> Vec<String> {
        set.iter().map(|&c| self.cells[c].name.clone()).collect()
    }

    /// Same cells in degree dim − k with the transposed coboundary; the boundary roles swap.
    pub fn dual(&self) -> ChainComplexModel {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell::new(c.name.clone(), self.dimension - c.degree))
            .collect();
        ChainComplexModel {
            dimension: self.dimension,
            cells,
            d: self.d.transpose(),
            boundary_a: self.boundary_b.clone(),
            boundary_b: self.boundary_a.clone(),
        }
    }

    /// Product cells `x_y` with d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy; no boundary marked.
    pub fn product(&self, other: &ChainComplexModel) -> ChainComplexModel {
        let (n1, n2) = (self.cells.len(), other.cells.len());
        let idx = |i: usize, j: usize| i * n2 + j;
        let mut cells = Vec::with_capacity(n1 * n2);
        for x in &self.cells {
            for y in &other.cells {
                cells.push(Cell::new(format!("{}_{}", x.name, y.name), x.degree + y.degree));
            }
        }
        let mut d = Matrix::zeros(n1 * n2, n1 * n2);
        for x in 0..n1 {
            for y in 0..n2 {
                for x2 in 0..n1 {
                    let v = self.d.get(x2, x);
                    if !v.is_zero() {
                        d.set(idx(x2, y), idx(x, y), v.clone());
                    }
                }
                let s = if self.cells[x].degree % 2 == 0 { Q::one() } else { -Q::one() };
                for y2 in 0..n2 {
                    let v = other.d.get(y2, y);
                    if !v.is_zero() {
                        d.set(idx(x, y2), idx(x, y), v * &s);
                    }
                }
            }
        }
        ChainComplexModel {
            dimension: self.dimension + other.dimension,
            cells,
            d,
            boundary_a: BTreeSet::new(),
            boundary_b: BTreeSet::new(),
        }
    }

    /// The same complex with new boundary markings.
    pub fn with_boundary(&self, boundary_a: &[&str], boundary_b: &[&str]) -> Result<ChainComplexModel, ModelError> {
        let a = boundary_a.iter().map(|c| self.index_of(c)).collect::<Result<_, _>>()?;
        let b = boundary_b.iter().map(|c| self.index_of(c)).collect::<Result<_, _>>()?;
        Self::from_parts(self.dimension, self.cells.clone(), self.d.clone(), a, b)
    }

    /// Disjoint union with prefixed names plus extra incidences (by new names);
    /// cells in `unmark` leave the boundary.
    pub fn union_with(
        &self,
        prefix: &str,
        other: &ChainComplexModel,
        other_prefix: &str,
        extra: &[Incidence],
        unmark: &[String],
    ) -> Result<ChainComplexModel, ModelError> {
        let mut cells: Vec<Cell> =
            self.cells.iter().map(|c| Cell::new(format!("{prefix}{}", c.name), c.degree)).collect();
        cells.extend(other.cells.iter().map(|c| Cell::new(format!("{other_prefix}{}", c.name), c.degree)));
        let mut inc: Vec<Incidence> = self
            .incidences()
            .into_iter()
            .map(|(t, s, v)| (format!("{prefix}{t}"), format!("{prefix}{s}"), v))
            .collect();
        inc.extend(
            other
                .incidences()
                .into_iter()
                .map(|(t, s, v)| (format!("{other_prefix}{t}"), format!("{other_prefix}{s}"), v)),
        );
        inc.extend(extra.iter().cloned());
        let mut ba: Vec<String> = self.names(&self.boundary_a).into_iter().map(|n| format!("{prefix}{n}")).collect();
        ba.extend(other.names(&other.boundary_a).into_iter().map(|n| format!("{other_prefix}{n}")));
        let mut bb: Vec<String> = self.names(&self.boundary_b).into_iter().map(|n| format!("{prefix}{n}")).collect();
        bb.extend(other.names(&other.boundary_b).into_iter().map(|n| format!("{other_prefix}{n}")));
        ba.retain(|n| !unmark.contains(n));
        bb.retain(|n| !unmark.contains(n));
        let ba: Vec<&str> = ba.iter().map(String::as_str).collect();
        let bb: Vec<&str> = bb.iter().map(String::as_str).collect();
        ChainComplexModel::new(self.dimension.max(other.dimension), cells, &inc, &ba, &bb)
    }
}

fn inc(t: &str, s: &str, v: i64) -> Incidence {
    (t.to_string(), s.to_string(), Q::from_integer(v.into()))
}

/// Two vertices and an edge, both endpoints A-fixed.
pub fn interval() -> ChainComplexModel {
    free_interval().with_boundary(&["v0", "v1"], &[]).expect("vertices have no faces")
}

pub fn free_interval() -> ChainComplexModel {
    ChainComplexModel::new(
        1,
        vec![Cell::new("v0", 0), Cell::new("e", 1), Cell::new("v1", 0)],
        &[inc("e", "v1", 1), inc("e", "v0", -1)],
        &[],
        &[],
    )
    .expect("interval")
}

/// The dual cell structure of the interval, both ends B-fixed.
pub fn dual_interval() -> ChainComplexModel {
    interval().dual()
}

/// A vertex v0 (A-fixed), an edge e0 to an inner vertex w, and a half-edge f1 (B-fixed).
pub fn collar() -> ChainComplexModel {
    ChainComplexModel::new(
        1,
        vec![Cell::new("v0", 0), Cell::new("e0", 1), Cell::new("w", 0), Cell::new("f1", 1)],
        &[inc("e0", "w", 1), inc("e0", "v0", -1), inc("f1", "w", -1)],
        &["v0"],
        &["f1"],
    )
    .expect("collar")
}

/// n vertices and n edges e_i from v_i to v_{i+1}.
pub fn circle(n: usize) -> ChainComplexModel {
    let mut cells: Vec<Cell> = (0..n).map(|i| Cell::new(format!("v{i}"), 0)).collect();
    cells.extend((0..n).map(|i| Cell::new(format!("e{i}"), 1)));
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push(inc(&format!("e{i}"), &format!("v{}", (i + 1) % n), 1));
        entries.push(inc(&format!("e{i}"), &format!("v{i}"), -1));
    }
    ChainComplexModel::new(1, cells, &entries, &[], &[]).expect("circle")
}

/// A triangle coned off at a center c: rim v_i, r_i; spokes s_i; faces t_i. The
/// rim is A-fixed.
pub fn disk() -> ChainComplexModel {
    let mut cells = vec![Cell::new("c", 0)];
    for i in 0..3 {
        cells.push(Cell::new(format!("v{i}"), 0));
    }
    for i in 0..3 {
        cells.push(Cell::new(format!("s{i}"), 1));
        cells.push(Cell::new(format!("r{i}"), 1));
    }
    for i in 0..3 {
        cells.push(Cell::new(format!("t{i}"), 2));
    }
    let mut e = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        e.push(inc(&format!("s{i}"), &format!("v{i}"), 1));
        e.push(inc(&format!("s{i}"), "c", -1));
        e.push(inc(&format!("r{i}"), &format!("v{j}"), 1));
        e.push(inc(&format!("r{i}"), &format!("v{i}"), -1));
        e.push(inc(&format!("t{i}"), &format!("s{i}"), 1));
        e.push(inc(&format!("t{i}"), &format!("r{i}"), 1));
        e.push(inc(&format!("t{i}"), &format!("s{j}"), -1));
    }
    let rim = ["v0", "v1", "v2", "r0", "r1", "r2"];
    ChainComplexModel::new(2, cells, &e, &rim, &[]).expect("disk")
}

/// The disk with its boundary circle B-fixed, via the dual cell structure.
pub fn disk_dual() -> ChainComplexModel {
    disk().dual()
}

/// Circle × interval with both boundary circles A-fixed.
pub fn annulus() -> ChainComplexModel {
    let p = circle(3).product(&free_interval());
    let ends: Vec<String> = p
        .cells()
        .iter()
        .filter(|c| c.name.ends_with("_v0") || c.name.ends_with("_v1"))
        .map(|c| c.name.clone())
        .collect();
    let ends: Vec<&str> = ends.iter().map(String::as_str).collect();
    p.with_boundary(&ends, &[]).expect("ends of a cylinder are subcomplexes")
}

/// A loop w → x → w with an A-fixed tail v–e–w and a B-fixed half-edge f at w.
pub fn lasso() -> ChainComplexModel {
    ChainComplexModel::new(
        1,
        vec![
            Cell::new("v", 0),
            Cell::new("e", 1),
            Cell::new("w", 0),
            Cell::new("x", 0),
            Cell::new("l1", 1),
            Cell::new("l2", 1),
            Cell::new("f", 1),
        ],
        &[
            inc("e", "w", 1),
            inc("e", "v", -1),
            inc("l1", "x", 1),
            inc("l1", "w", -1),
            inc("l2", "w", 1),
            inc("l2", "x", -1),
            inc("f", "w", -1),
        ],
        &["v"],
        &["f"],
    )
    .expect("lasso")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_complexes() {
        let cells = vec![Cell::new("a", 0), Cell::new("b", 1), Cell::new("c", 2)];
        let bad = ChainComplexModel::new(2, cells, &[inc("b", "a", 1), inc("c", "b", 1)], &[], &[]);
        assert_eq!(bad, Err(ModelError::NotDifferential));
        assert!(matches!(free_interval().with_boundary(&["e"], &[]), Err(ModelError::NotFaceClosed(..))));
        assert!(matches!(free_interval().with_boundary(&[], &["v0"]), Err(ModelError::NotCofaceClosed(..))));
        assert!(matches!(free_interval().with_boundary(&["v0"], &["v0"]), Err(ModelError::OverlappingBoundary(_))));
    }

    #[test]
    fn dual_and_product() {
        let d = interval().dual();
        assert_eq!(d.boundary_b().len(), 2);
        assert_eq!(d.cells()[1].degree, 0);
        assert_eq!(d.dual(), interval());
        let a = annulus();
        assert_eq!(a.cells().len(), 18);
        assert_eq!(a.interior().len(), 6);
        assert!(disk().coboundary().mul(disk().coboundary()).is_zero());
    }
}
