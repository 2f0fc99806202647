//! Feynman graphs with bulk and boundary vertices, isomorphism classes, and
//! codimension-one strata of compactified configuration spaces.
//!
//! Vertices are numbered bulk first: `0..n` are bulk, `n..n+m` boundary.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_VERTICES: usize = 7;
pub const MAX_EDGES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("n+m = {vertices}, edges ≤ {edges} exceeds the enumeration bound; about {estimate} labeled graphs")]
    TooLarge { vertices: usize, edges: usize, estimate: u128 },
    #[error("edge ({0}, {1}) references a missing vertex")]
    BadEndpoint(usize, usize),
    #[error("loop at vertex {0} but loops are not allowed")]
    LoopNotAllowed(usize),
    #[error("edge ({0}, {1}) repeated but multi-edges are not allowed")]
    MultiNotAllowed(usize, usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphFlags {
    pub oriented: bool,
    pub loops: bool,
    pub multi: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeynmanGraph {
    pub bulk: usize,
    pub boundary: usize,
    /// Sorted; unoriented edges are stored with the smaller endpoint first.
    pub edges: Vec<(usize, usize)>,
    pub flags: GraphFlags,
}

fn normalize(e: (usize, usize), oriented: bool) -> (usize, usize) {
    if oriented || e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

impl FeynmanGraph {
    pub fn new(bulk: usize, boundary: usize, edges: Vec<(usize, usize)>, flags: GraphFlags) -> Result<Self, GraphError> {
        let nv = bulk + boundary;
        let mut edges: Vec<_> = edges.into_iter().map(|e| normalize(e, flags.oriented)).collect();
        edges.sort();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a >= nv || b >= nv {
                return Err(GraphError::BadEndpoint(a, b));
            }
            if a == b && !flags.loops {
                return Err(GraphError::LoopNotAllowed(a));
            }
            if !flags.multi && k > 0 && edges[k - 1] == (a, b) {
                return Err(GraphError::MultiNotAllowed(a, b));
            }
        }
        Ok(FeynmanGraph { bulk, boundary, edges, flags })
    }

    pub fn vertex_count(&self) -> usize {
        self.bulk + self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v >= self.bulk
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Relabels vertices by `perm` (old → new).
    pub fn relabeled(&self, perm: &[usize]) -> FeynmanGraph {
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| normalize((perm[a], perm[b]), self.flags.oriented))
            .collect();
        edges.sort();
        FeynmanGraph { edges, ..self.clone() }
    }

    /// Permutations fixing the bulk/boundary partition.
    fn partition_perms(&self) -> Vec<Vec<usize>> {
        let (n, m) = (self.bulk, self.boundary);
        let bulk: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let bdry: Vec<Vec<usize>> = (n..n + m).permutations(m).collect();
        bulk.iter()
            .cartesian_product(bdry.iter())
            .map(|(a, b)| a.iter().chain(b.iter()).copied().collect())
            .collect()
    }

    /// Lexicographically least relabeling.
    pub fn canonical(&self) -> FeynmanGraph {
        self.partition_perms()
            .iter()
            .map(|p| self.relabeled(p))
            .min()
            .expect("identity permutation")
    }

    pub fn automorphism_count(&self) -> usize {
        self.partition_perms().iter().filter(|p| self.relabeled(p) == *self).count()
    }
}

/// ℓ(Γ) = |E| − |V| + #components.
pub fn loop_number(g: &FeynmanGraph) -> usize {
    g.edges.len() + g.components().len() - g.vertex_count()
}

fn candidate_edges(nv: usize, flags: GraphFlags) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..nv {
        for b in 0..nv {
            if (a == b && !flags.loops) || (!flags.oriented && b < a) {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of labeled graphs with at most `max_edges` edges.
pub fn labeled_count_estimate(n: usize, m: usize, max_edges: usize, flags: GraphFlags) -> u128 {
    let p = candidate_edges(n + m, flags).len() as u128;
    (0..=max_edges as u128)
        .map(|k| if flags.multi { binomial(p + k - 1, k) } else if k <= p { binomial(p, k) } else { 0 })
        .sum()
}

fn check_bounds(n: usize, m: usize, max_edges: usize, flags: GraphFlags) -> Result<(), GraphError> {
    if n + m > MAX_VERTICES || max_edges > MAX_EDGES {
        return Err(GraphError::TooLarge {
            vertices: n + m,
            edges: max_edges,
            estimate: labeled_count_estimate(n, m, max_edges, flags),
        });
    }
    Ok(())
}

/// Isomorphism classes (fixing the partition) as canonical representatives in
/// increasing order, grown one edge at a time.
pub fn enumerate_graphs(n: usize, m: usize, max_edges: usize, flags: GraphFlags) -> Result<Vec<FeynmanGraph>, GraphError> {
    check_bounds(n, m, max_edges, flags)?;
    let cands = candidate_edges(n + m, flags);
    let empty = FeynmanGraph { bulk: n, boundary: m, edges: Vec::new(), flags };
    let mut all: BTreeSet<FeynmanGraph> = BTreeSet::from([empty.clone()]);
    let mut layer = vec![empty];
    for _ in 0..max_edges {
        let mut next = BTreeSet::new();
        for g in &layer {
            for &e in &cands {
                if !flags.multi && g.edges.contains(&e) {
                    continue;
                }
                let mut edges = g.edges.clone();
                edges.push(e);
                edges.sort();
                let h = FeynmanGraph { edges, ..g.clone() }.canonical();
                next.insert(h);
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        layer = next.into_iter().collect();
    }
    Ok(all.into_iter().collect())
}

/// Every labeled graph with at most `max_edges` edges.
pub fn enumerate_labeled(n: usize, m: usize, max_edges: usize, flags: GraphFlags) -> Result<Vec<FeynmanGraph>, GraphError> {
    check_bounds(n, m, max_edges, flags)?;
    let cands = candidate_edges(n + m, flags);
    let mut out = Vec::new();
    for k in 0..=max_edges {
        let choices: Vec<Vec<(usize, usize)>> = if flags.multi {
            cands.iter().copied().combinations_with_replacement(k).collect()
        } else {
            cands.iter().copied().combinations(k).collect()
        };
        for edges in choices {
            out.push(FeynmanGraph { bulk: n, boundary: m, edges, flags });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    Closed,
    TypeI,
    TypeII,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Host {
    Closed { points: usize },
    Boundary { bulk: usize, boundary: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDescriptor {
    pub kind: StratumKind,
    pub set: Vec<usize>,
    pub host: Host,
}

impl StratumDescriptor {
    fn split(&self) -> (i64, i64, i64, i64) {
        match self.host {
            Host::Closed { points } => (points as i64, 0, self.set.len() as i64, 0),
            Host::Boundary { bulk, boundary } => {
                let su = self.set.iter().filter(|&&v| v < bulk).count() as i64;
                (bulk as i64, boundary as i64, su, self.set.len() as i64 - su)
            }
        }
    }

    /// Dimension of the stratum for a `dim`-manifold: fiber plus collapsed base.
    pub fn stratum_dimension(&self, dim: u32) -> i64 {
        let d = dim as i64;
        let (u, v, su, sv) = self.split();
        match self.kind {
            StratumKind::Closed | StratumKind::TypeI => {
                let fiber = su * d - d - 1;
                fiber + (u - su + 1) * d + v * (d - 1)
            }
            StratumKind::TypeII => {
                let fiber = su * d + sv * (d - 1) - (d - 1) - 1;
                fiber + (u - su) * d + (v - sv + 1) * (d - 1)
            }
        }
    }

    pub fn ambient_dimension(&self, dim: u32) -> i64 {
        let d = dim as i64;
        let (u, v, _, _) = self.split();
        u * d + v * (d - 1)
    }

    pub fn codimension(&self, dim: u32) -> i64 {
        self.ambient_dimension(dim) - self.stratum_dimension(dim)
    }
}

fn subsets_at_least(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in k..=items.len() {
        out.extend(items.iter().copied().combinations(size));
    }
    out
}

/// Collapses of one subset of at least two points; 2ⁿ − n − 1 of them.
pub fn codim1_strata_closed(n: usize) -> Vec<StratumDescriptor> {
    let pts: Vec<usize> = (0..n).collect();
    subsets_at_least(&pts, 2)
        .into_iter()
        .map(|set| StratumDescriptor { kind: StratumKind::Closed, set, host: Host::Closed { points: n } })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryStrata {
    pub type_one: Vec<StratumDescriptor>,
    pub type_two: Vec<StratumDescriptor>,
    /// Single boundary points: not a collapse, listed for the record.
    pub excluded_singletons: Vec<usize>,
}

pub fn codim1_strata_boundary(n_bulk: usize, n_boundary: usize) -> BoundaryStrata {
    let host = Host::Boundary { bulk: n_bulk, boundary: n_boundary };
    let bulk: Vec<usize> = (0..n_bulk).collect();
    let all: Vec<usize> = (0..n_bulk + n_boundary).collect();
    let type_one = subsets_at_least(&bulk, 2)
        .into_iter()
        .map(|set| StratumDescriptor { kind: StratumKind::TypeI, set, host })
        .collect();
    let mut two_sets: Vec<Vec<usize>> = bulk.iter().map(|&u| vec![u]).collect();
    two_sets.extend(subsets_at_least(&all, 2));
    let type_two = two_sets
        .into_iter()
        .map(|set| StratumDescriptor { kind: StratumKind::TypeII, set, host })
        .collect();
    BoundaryStrata { type_one, type_two, excluded_singletons: (n_bulk..n_bulk + n_boundary).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceClass {
    /// Two bulk vertices collapse.
    BulkPair,
    /// Three or more bulk vertices collapse away from the boundary.
    Hidden,
    /// A set collapses onto the boundary.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub class: FaceClass,
    pub stratum: StratumDescriptor,
    /// The collapsing subgraph Γ′.
    pub subgraph: FeynmanGraph,
    /// Γ/Γ′, with the merged vertex last in its block.
    pub quotient: FeynmanGraph,
    /// The set is exactly the vertex set of a connected component.
    pub whole_component: bool,
}

fn collapse(g: &FeynmanGraph, set: &[usize], onto_boundary: bool) -> (FeynmanGraph, FeynmanGraph) {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let sub_bulk: Vec<usize> = set.iter().copied().filter(|&v| !g.is_boundary(v)).collect();
    let sub_bdry: Vec<usize> = set.iter().copied().filter(|&v| g.is_boundary(v)).collect();
    let mut sub_index = BTreeMap::new();
    for (i, &v) in sub_bulk.iter().chain(sub_bdry.iter()).enumerate() {
        sub_index.insert(v, i);
    }
    let rest_bulk: Vec<usize> = (0..g.bulk).filter(|v| !inside.contains(v)).collect();
    let rest_bdry: Vec<usize> = (g.bulk..g.vertex_count()).filter(|v| !inside.contains(v)).collect();
    let (q_bulk, q_bdry) = if onto_boundary {
        (rest_bulk.len(), rest_bdry.len() + 1)
    } else {
        (rest_bulk.len() + 1, rest_bdry.len())
    };
    let merged = if onto_boundary { q_bulk + q_bdry - 1 } else { q_bulk - 1 };
    let mut q_index = BTreeMap::new();
    for (i, &v) in rest_bulk.iter().enumerate() {
        q_index.insert(v, i);
    }
    for (i, &v) in rest_bdry.iter().enumerate() {
        q_index.insert(v, q_bulk + i);
    }
    let mut sub_edges = Vec::new();
    let mut q_edges = Vec::new();
    for &(a, b) in &g.edges {
        if inside.contains(&a) && inside.contains(&b) {
            sub_edges.push((sub_index[&a], sub_index[&b]));
        } else {
            let map = |v: usize| if inside.contains(&v) { merged } else { q_index[&v] };
            q_edges.push((map(a), map(b)));
        }
    }
    let mut qflags = g.flags;
    // edges into the merged vertex may repeat or close up
    qflags.multi = true;
    qflags.loops = true;
    let sub = FeynmanGraph::new(sub_bulk.len(), sub_bdry.len(), sub_edges, g.flags).expect("induced subgraph");
    let quot = FeynmanGraph::new(q_bulk, q_bdry, q_edges, qflags).expect("quotient graph");
    (sub, quot)
}

/// All codimension-one faces of the configuration space of Γ, by class.
pub fn stratum_face_classes(g: &FeynmanGraph) -> Vec<Face> {
    let comps: BTreeSet<Vec<usize>> = g.components().into_iter().collect();
    let mut faces = Vec::new();
    let host = if g.boundary == 0 {
        None
    } else {
        Some(codim1_strata_boundary(g.bulk, g.boundary))
    };
    let bulk_strata = match &host {
        Some(b) => b.type_one.clone(),
        None => codim1_strata_closed(g.bulk),
    };
    for st in bulk_strata {
        let (subgraph, quotient) = collapse(g, &st.set, false);
        let class = if st.set.len() == 2 { FaceClass::BulkPair } else { FaceClass::Hidden };
        let whole_component = comps.contains(&st.set);
        faces.push(Face { class, stratum: st, subgraph, quotient, whole_component });
    }
    if let Some(b) = host {
        for st in b.type_two {
            let (subgraph, quotient) = collapse(g, &st.set, true);
            let whole_component = comps.contains(&st.set);
            faces.push(Face { class: FaceClass::Boundary, stratum: st, subgraph, quotient, whole_component });
        }
    }
    faces
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: GraphFlags = GraphFlags { oriented: false, loops: false, multi: false };

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_graphs(2, 0, 1, SIMPLE).unwrap().len(), 2);
        assert_eq!(enumerate_labeled(3, 0, 3, SIMPLE).unwrap().len(), 8);
        assert_eq!(enumerate_graphs(3, 0, 3, SIMPLE).unwrap().len(), 4);
        let tadpoles = GraphFlags { loops: true, multi: true, ..SIMPLE };
        assert_eq!(enumerate_graphs(1, 0, 2, tadpoles).unwrap().len(), 3);
        assert!(matches!(enumerate_graphs(5, 3, 2, SIMPLE), Err(GraphError::TooLarge { .. })));
    }

    #[test]
    fn loop_numbers() {
        let tad = FeynmanGraph::new(1, 0, vec![(0, 0)], GraphFlags { loops: true, ..SIMPLE }).unwrap();
        assert_eq!(loop_number(&tad), 1);
        let tree = FeynmanGraph::new(4, 0, vec![(0, 1), (1, 2), (1, 3)], SIMPLE).unwrap();
        assert_eq!(loop_number(&tree), 0);
        let theta = FeynmanGraph::new(2, 0, vec![(0, 1); 3], GraphFlags { multi: true, ..SIMPLE }).unwrap();
        assert_eq!(loop_number(&theta), 2);
    }

    #[test]
    fn strata_counts() {
        assert_eq!(codim1_strata_closed(2).len(), 1);
        assert_eq!(codim1_strata_closed(3).len(), 4);
        assert_eq!(codim1_strata_closed(4).len(), 11);
        let counts = |u, v| {
            let b = codim1_strata_boundary(u, v);
            (b.type_one.len(), b.type_two.len())
        };
        assert_eq!(counts(1, 1), (0, 2));
        assert_eq!(counts(2, 0), (1, 3));
        assert_eq!(counts(0, 2), (0, 1));
        for st in codim1_strata_boundary(2, 2).type_two.iter().chain(&codim1_strata_closed(4)) {
            assert_eq!(st.codimension(3), 1);
        }
    }

    #[test]
    fn faces() {
        let edge = FeynmanGraph::new(2, 0, vec![(0, 1)], SIMPLE).unwrap();
        let f = stratum_face_classes(&edge);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].class, FaceClass::BulkPair);
        assert!(f[0].whole_component);
        let g = FeynmanGraph::new(2, 1, vec![(0, 1), (1, 2)], SIMPLE).unwrap();
        for face in stratum_face_classes(&g) {
            let merged = face.subgraph.vertex_count() + face.quotient.vertex_count();
            assert_eq!(merged, g.vertex_count() + 1);
            assert_eq!(face.subgraph.edges.len() + face.quotient.edges.len(), g.edges.len());
            if face.class == FaceClass::Boundary {
                assert_eq!(face.quotient.boundary, g.boundary - face.subgraph.boundary + 1);
            }
        }
    }
}
