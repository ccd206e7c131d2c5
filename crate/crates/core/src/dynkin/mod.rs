//! Multigraphs of (−2)-vectors: parabolic subdiagrams, maximal parabolic
//! decompositions, Vinberg's finite-index test and graph symmetries.

pub mod automorph;
pub mod classify;

use crate::exactlat::matrix::{rank, signature, to_big};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub use automorph::{automorphism_group, find_isomorphism, ColoredGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynkinError {
    #[error("vertex set {0:?} is not connected")]
    Disconnected(Vec<usize>),
    #[error("edge {0}-{1} has multiplicity {2}; only graphs without m-tuple lines (m >= 3) are supported")]
    TripleEdge(usize, usize, i64),
    #[error("multiplicity matrix is not symmetric with zero diagonal and non-negative entries")]
    Malformed,
    #[error("vertex set {0:?} is parabolic but its shape was not recognized")]
    Unrecognized(Vec<usize>),
    #[error("graph has {0} vertices; at most 128 are supported")]
    TooLarge(usize),
}

/// (−2)-vectors as vertices, `m[i][j] = ⟨v_i, v_j⟩` for `i ≠ j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub labels: Vec<String>,
    pub effective: Vec<bool>,
    pub m: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffineType {
    pub family: Family,
    pub parameter: usize,
    pub rank: usize,
}

impl AffineType {
    pub fn new(family: Family, parameter: usize) -> Self {
        AffineType {
            family,
            parameter,
            rank: parameter,
        }
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        };
        write!(f, "~{fam}{}", self.parameter)
    }
}

/// A connected parabolic subdiagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parabolic {
    pub vertices: Vec<usize>,
    pub ty: AffineType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicDecomposition {
    pub components: Vec<Parabolic>,
    pub rank: usize,
}

impl ParabolicDecomposition {
    /// Component types, largest first.
    pub fn type_multiset(&self) -> Vec<AffineType> {
        let mut t: Vec<AffineType> = self.components.iter().map(|c| c.ty).collect();
        t.sort_by(|a, b| b.cmp(a));
        t
    }

    pub fn type_string(&self) -> String {
        self.type_multiset().iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VinbergReport {
    pub span_rank: usize,
    pub span_signature: (usize, usize, usize),
    pub nondegenerate: bool,
    pub triple_edge_free: bool,
    pub parabolic_count: usize,
    pub max_rank: usize,
    pub verdict: bool,
    /// For each connected parabolic, a completing decomposition of rank `n − 1` (by index).
    pub witnesses: Vec<(Vec<usize>, Option<usize>)>,
    pub failing: Vec<Vec<usize>>,
    pub decompositions: Vec<ParabolicDecomposition>,
}

impl WeightedGraph {
    pub fn new(labels: Vec<String>, effective: Vec<bool>, m: Vec<Vec<i64>>) -> Result<Self, DynkinError> {
        let n = m.len();
        let ok = labels.len() == n
            && effective.len() == n
            && m.iter().all(|r| r.len() == n)
            && (0..n).all(|i| m[i][i] == 0 && (0..n).all(|j| m[i][j] == m[j][i] && m[i][j] >= 0));
        if !ok {
            return Err(DynkinError::Malformed);
        }
        Ok(WeightedGraph { labels, effective, m })
    }

    /// Build from a Gram matrix of (−2)-vectors.
    pub fn from_gram(labels: Vec<String>, effective: Vec<bool>, gram: &[Vec<i64>]) -> Result<Self, DynkinError> {
        let n = gram.len();
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { gram[i][j] }).collect()).collect();
        WeightedGraph::new(labels, effective, m)
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| if i == j { -2 } else { self.m[i][j] }).collect()).collect()
    }

    pub fn triple_edge(&self) -> Option<(usize, usize, i64)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.m[i][j] >= 3)
            .map(|(i, j)| (i, j, self.m[i][j]))
    }

    fn require_simple(&self) -> Result<(), DynkinError> {
        if self.len() > 128 {
            return Err(DynkinError::TooLarge(self.len()));
        }
        match self.triple_edge() {
            Some((i, j, m)) => Err(DynkinError::TripleEdge(i, j, m)),
            None => Ok(()),
        }
    }

    fn neighbors(&self) -> Vec<u128> {
        (0..self.len())
            .map(|i| (0..self.len()).filter(|&j| self.m[i][j] != 0).fold(0u128, |acc, j| acc | (1 << j)))
            .collect()
    }

    pub fn is_connected(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut seen = vec![set[0]];
        let mut k = 0;
        while k < seen.len() {
            let v = seen[k];
            for &u in set {
                if !seen.contains(&u) && self.m[v][u] != 0 {
                    seen.push(u);
                }
            }
            k += 1;
        }
        seen.len() == set.len()
    }

    pub fn colored(&self, respect_flags: bool) -> ColoredGraph {
        let colors = self.effective.iter().map(|&e| if respect_flags { u64::from(e) } else { 0 }).collect();
        ColoredGraph::new(self.m.clone(), colors)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for (i, l) in self.labels.iter().enumerate() {
            let style = if self.effective[i] { "filled" } else { "dashed" };
            s += &format!("  v{i} [label=\"{l}\", style={style}];\n");
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                for _ in 0..self.m[i][j] {
                    s += &format!("  v{i} -- v{j};\n");
                }
            }
        }
        s + "}\n"
    }
}

/// JSON exchange form: `{vertices: [{label, effective}], edges: [[i, j, m]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub label: String,
    pub effective: bool,
}

impl From<&WeightedGraph> for GraphJson {
    fn from(g: &WeightedGraph) -> Self {
        let vertices = g
            .labels
            .iter()
            .zip(&g.effective)
            .map(|(l, &e)| VertexJson {
                label: l.clone(),
                effective: e,
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if g.m[i][j] != 0 {
                    edges.push((i, j, g.m[i][j]));
                }
            }
        }
        GraphJson { vertices, edges }
    }
}

impl TryFrom<GraphJson> for WeightedGraph {
    type Error = DynkinError;
    fn try_from(j: GraphJson) -> Result<Self, DynkinError> {
        let n = j.vertices.len();
        let mut m = vec![vec![0; n]; n];
        for &(a, b, w) in &j.edges {
            if a >= n || b >= n || a == b {
                return Err(DynkinError::Malformed);
            }
            m[a][b] = w;
            m[b][a] = w;
        }
        WeightedGraph::new(
            j.vertices.iter().map(|v| v.label.clone()).collect(),
            j.vertices.iter().map(|v| v.effective).collect(),
            m,
        )
    }
}

/// Affine type of a connected vertex set, or `None` if it is not parabolic.
///
/// Parabolicity is decided spectrally; the shape classifier only names it.
pub fn parabolic_type(g: &WeightedGraph, set: &[usize]) -> Result<Option<AffineType>, DynkinError> {
    if !g.is_connected(set) {
        return Err(DynkinError::Disconnected(set.to_vec()));
    }
    if !classify::is_parabolic_spectral(&g.m, set) {
        return Ok(None);
    }
    match classify::classify_structural(&g.m, set) {
        Some(t) => Ok(Some(t)),
        None => Err(DynkinError::Unrecognized(set.to_vec())),
    }
}

/// `det(2I − M)` restricted to `set`, by fraction-free elimination.
fn det_neg_gram(m: &[Vec<i64>], set: &[usize]) -> i128 {
    let n = set.len();
    let mut a: Vec<Vec<i128>> = set
        .iter()
        .map(|&i| set.iter().map(|&j| if i == j { 2 } else { -(m[i][j] as i128) }).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn bits(mask: u128) -> Vec<usize> {
    (0..128).filter(|i| mask >> i & 1 == 1).collect()
}

/// Every connected parabolic subdiagram.
///
/// Connected sets are grown so each is produced once (smallest vertex as
/// root, extension only through exclusive neighbors). A set is extended only
/// while its Gram is negative definite; adding one vertex to a definite set
/// yields a parabolic exactly when the determinant vanishes.
pub fn enumerate_parabolics(g: &WeightedGraph) -> Result<Vec<Parabolic>, DynkinError> {
    g.require_simple()?;
    let nb = g.neighbors();
    let cap = g.len();
    let mut found: Vec<Vec<usize>> = Vec::new();

    fn extend(g: &WeightedGraph, nb: &[u128], root: usize, set: u128, ext: u128, cap: usize, found: &mut Vec<Vec<usize>>) {
        let mut ext = ext;
        let nset = set.count_ones() as usize;
        if nset >= cap {
            return;
        }
        let closed = bits(set).iter().fold(set, |acc, &v| acc | nb[v]);
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= !(1u128 << w);
            let grown = set | (1u128 << w);
            let members = bits(grown);
            let d = det_neg_gram(&g.m, &members);
            if d < 0 {
                continue;
            }
            if d == 0 {
                found.push(members);
                continue;
            }
            let above_root = !((1u128 << (root + 1)) - 1);
            let excl = nb[w] & !closed & above_root;
            extend(g, nb, root, grown, ext | excl, cap, found);
        }
    }

    for v in 0..g.len() {
        let above = if v + 1 >= 128 { 0 } else { !((1u128 << (v + 1)) - 1) };
        extend(g, &nb, v, 1u128 << v, nb[v] & above, cap, &mut found);
    }
    found.sort();
    found
        .into_iter()
        .map(|vs| match parabolic_type(g, &vs)? {
            Some(ty) => Ok(Parabolic { vertices: vs, ty }),
            None => Err(DynkinError::Unrecognized(vs)),
        })
        .collect()
}

/// All unions of pairwise disjoint, pairwise non-adjacent connected
/// parabolics that reach the largest total rank.
pub fn maximal_decompositions(g: &WeightedGraph, parabolics: &[Parabolic]) -> Vec<ParabolicDecomposition> {
    let nb = g.neighbors();
    let masks: Vec<u128> = parabolics.iter().map(|p| p.vertices.iter().fold(0u128, |a, &v| a | (1 << v))).collect();
    let closed: Vec<u128> = parabolics
        .iter()
        .zip(&masks)
        .map(|(p, &m)| p.vertices.iter().fold(m, |a, &v| a | nb[v]))
        .collect();
    let mut best = 0usize;
    let mut out: Vec<Vec<usize>> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        forbidden: u128,
        rank: usize,
        cur: &mut Vec<usize>,
        ps: &[Parabolic],
        masks: &[u128],
        closed: &[u128],
        best: &mut usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rank > *best {
            *best = rank;
            out.clear();
        }
        if rank == *best && rank > 0 {
            out.push(cur.clone());
        }
        for k in i..ps.len() {
            if masks[k] & forbidden == 0 {
                cur.push(k);
                go(k + 1, forbidden | closed[k], rank + ps[k].ty.rank, cur, ps, masks, closed, best, out);
                cur.pop();
            }
        }
    }
    go(0, 0, 0, &mut Vec::new(), parabolics, &masks, &closed, &mut best, &mut out);
    out.into_iter()
        .map(|idx| ParabolicDecomposition {
            components: idx.iter().map(|&k| parabolics[k].clone()).collect(),
            rank: best,
        })
        .collect()
}

/// Distinct type multisets among decompositions, each with a representative.
pub fn type_multisets(decs: &[ParabolicDecomposition]) -> BTreeMap<String, (usize, usize)> {
    let mut m: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (i, d) in decs.iter().enumerate() {
        m.entry(d.type_string()).or_insert((0, i)).0 += 1;
    }
    m
}

/// Vinberg's criterion for a lattice of signature `(1, n)`: the graph must
/// span a non-degenerate hyperbolic space of rank `n + 1` and every connected
/// parabolic must be a component of some parabolic subdiagram of rank `n − 1`.
pub fn vinberg_check(g: &WeightedGraph, n: usize) -> Result<VinbergReport, DynkinError> {
    let triple_edge_free = g.triple_edge().is_none();
    let gram = to_big(&g.gram());
    let span_rank = rank(&gram);
    let sig = signature(&gram);
    let nondegenerate = span_rank == n + 1 && sig.positive == 1 && sig.negative == n;
    let mut report = VinbergReport {
        span_rank,
        span_signature: (sig.positive, sig.negative, sig.zero),
        nondegenerate,
        triple_edge_free,
        parabolic_count: 0,
        max_rank: 0,
        verdict: false,
        witnesses: Vec::new(),
        failing: Vec::new(),
        decompositions: Vec::new(),
    };
    if !triple_edge_free {
        let (i, j, m) = g.triple_edge().expect("checked");
        return Err(DynkinError::TripleEdge(i, j, m));
    }
    if !nondegenerate {
        return Ok(report);
    }
    let ps = enumerate_parabolics(g)?;
    let decs = maximal_decompositions(g, &ps);
    report.parabolic_count = ps.len();
    report.max_rank = decs.first().map_or(0, |d| d.rank);
    let full: Vec<usize> = (0..decs.len()).filter(|&k| decs[k].rank + 1 == n).collect();
    for p in &ps {
        let w = full
            .iter()
            .copied()
            .find(|&k| decs[k].components.iter().any(|c| c.vertices == p.vertices));
        if w.is_none() {
            report.failing.push(p.vertices.clone());
        }
        report.witnesses.push((p.vertices.clone(), w));
    }
    report.verdict = report.failing.is_empty() && !ps.is_empty() && report.max_rank + 1 == n;
    report.decompositions = decs;
    Ok(report)
}

/// Order of the weight-preserving symmetry group (optionally also preserving
/// effectiveness) with a generating set.
pub fn automorphism_count(g: &WeightedGraph, respect_flags: bool) -> (u128, Vec<Vec<usize>>) {
    automorphism_group(&g.colored(respect_flags))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, i64)]) -> WeightedGraph {
        let mut m = vec![vec![0; n]; n];
        for &(a, b, w) in edges {
            m[a][b] = w;
            m[b][a] = w;
        }
        WeightedGraph::new((0..n).map(|i| format!("v{i}")).collect(), vec![true; n], m).unwrap()
    }

    #[test]
    fn small_types() {
        let g = graph(2, &[(0, 1, 2)]);
        assert_eq!(parabolic_type(&g, &[0, 1]).unwrap(), Some(AffineType::new(Family::A, 1)));
        let g = graph(2, &[(0, 1, 1)]);
        assert_eq!(parabolic_type(&g, &[0, 1]).unwrap(), None);
        let g = graph(6, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1)]);
        assert_eq!(parabolic_type(&g, &[0, 1, 2, 3, 4, 5]).unwrap(), Some(AffineType::new(Family::A, 5)));
        let g = graph(5, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)]);
        assert_eq!(parabolic_type(&g, &[0, 1, 2, 3, 4]).unwrap(), Some(AffineType::new(Family::D, 4)));
        let g = graph(3, &[(0, 1, 1)]);
        assert!(matches!(parabolic_type(&g, &[0, 2]), Err(DynkinError::Disconnected(_))));
    }

    #[test]
    fn single_vertex_has_no_parabolics() {
        let g = graph(1, &[]);
        assert!(enumerate_parabolics(&g).unwrap().is_empty());
        assert_eq!(automorphism_count(&g, true).0, 1);
    }

    #[test]
    fn triple_edges_rejected() {
        let g = graph(2, &[(0, 1, 3)]);
        assert!(matches!(enumerate_parabolics(&g), Err(DynkinError::TripleEdge(0, 1, 3))));
    }

    #[test]
    fn degenerate_span_fails() {
        let g = graph(2, &[]);
        let r = vinberg_check(&g, 9).unwrap();
        assert!(!r.nondegenerate);
        assert_eq!(r.span_rank, 2);
        assert!(!r.verdict);
    }

    #[test]
    fn affine_e8_found() {
        // chain 0..7 with node 8 on node 2: arms 2, 5, 1
        let mut e: Vec<(usize, usize, i64)> = (0..7).map(|i| (i, i + 1, 1)).collect();
        e.push((2, 8, 1));
        let g = graph(9, &e);
        let ps = enumerate_parabolics(&g).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].ty, AffineType::new(Family::E, 8));
    }
}
