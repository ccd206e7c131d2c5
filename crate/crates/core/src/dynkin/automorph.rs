//! Isomorphisms and automorphism groups of vertex-colored weighted graphs by
//! color refinement and individualization.

use std::collections::BTreeMap;

/// Symmetric weight matrix with a color per vertex. Weights on the diagonal
/// are ignored (fold them into the color if they matter).
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    pub weights: Vec<Vec<i64>>,
    pub colors: Vec<u64>,
}

impl ColoredGraph {
    pub fn new(weights: Vec<Vec<i64>>, colors: Vec<u64>) -> Self {
        assert_eq!(weights.len(), colors.len());
        ColoredGraph { weights, colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn is_isomorphism(&self, other: &ColoredGraph, perm: &[usize]) -> bool {
        let n = self.len();
        perm.len() == n
            && (0..n).all(|i| self.colors[i] == other.colors[perm[i]])
            && (0..n).all(|i| (0..n).all(|j| i == j || self.weights[i][j] == other.weights[perm[i]][perm[j]]))
    }
}

type Sig = (u64, Vec<(u64, i64)>);

fn signature(g: &ColoredGraph, c: &[u64], v: usize) -> Sig {
    let mut nb: Vec<(u64, i64)> = (0..g.len())
        .filter(|&u| u != v && g.weights[v][u] != 0)
        .map(|u| (c[u], g.weights[v][u]))
        .collect();
    nb.sort_unstable();
    (c[v], nb)
}

/// Refine both colorings with a shared relabeling; `None` if they diverge.
fn refine_pair(g1: &ColoredGraph, c1: &mut Vec<u64>, g2: &ColoredGraph, c2: &mut Vec<u64>) -> bool {
    let mut classes = distinct(c1);
    loop {
        let s1: Vec<Sig> = (0..g1.len()).map(|v| signature(g1, c1, v)).collect();
        let s2: Vec<Sig> = (0..g2.len()).map(|v| signature(g2, c2, v)).collect();
        let mut ids: BTreeMap<&Sig, u64> = BTreeMap::new();
        for s in s1.iter().chain(&s2) {
            ids.insert(s, 0);
        }
        for (k, v) in ids.values_mut().enumerate() {
            *v = k as u64;
        }
        *c1 = s1.iter().map(|s| ids[s]).collect();
        *c2 = s2.iter().map(|s| ids[s]).collect();
        if histogram(c1) != histogram(c2) {
            return false;
        }
        let now = distinct(c1);
        if now == classes {
            return true;
        }
        classes = now;
    }
}

fn distinct(c: &[u64]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn histogram(c: &[u64]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for &x in c {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Smallest non-singleton cell, ties broken by color id.
fn target_cell(c: &[u64]) -> Option<u64> {
    histogram(c)
        .into_iter()
        .filter(|&(_, n)| n > 1)
        .min_by_key(|&(col, n)| (n, col))
        .map(|(col, _)| col)
}

fn individualize(c: &[u64], v: usize) -> Vec<u64> {
    let fresh = c.iter().max().map_or(0, |m| m + 1);
    let mut out = c.to_vec();
    out[v] = fresh;
    out
}

fn search(g1: &ColoredGraph, mut c1: Vec<u64>, g2: &ColoredGraph, mut c2: Vec<u64>) -> Option<Vec<usize>> {
    if !refine_pair(g1, &mut c1, g2, &mut c2) {
        return None;
    }
    match target_cell(&c1) {
        None => {
            let pos: BTreeMap<u64, usize> = c2.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let perm: Vec<usize> = c1.iter().map(|x| pos[x]).collect();
            g1.is_isomorphism(g2, &perm).then_some(perm)
        }
        Some(col) => {
            let v = c1.iter().position(|&x| x == col)?;
            for w in (0..g2.len()).filter(|&w| c2[w] == col) {
                if let Some(p) = search(g1, individualize(&c1, v), g2, individualize(&c2, w)) {
                    return Some(p);
                }
            }
            None
        }
    }
}

fn normalized_colors(a: &ColoredGraph, b: &ColoredGraph) -> (Vec<u64>, Vec<u64>) {
    let mut ids: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in a.colors.iter().chain(&b.colors) {
        ids.insert(x, 0);
    }
    for (k, v) in ids.values_mut().enumerate() {
        *v = k as u64;
    }
    (a.colors.iter().map(|x| ids[x]).collect(), b.colors.iter().map(|x| ids[x]).collect())
}

/// A color- and weight-preserving bijection `g1 → g2`, if one exists.
pub fn find_isomorphism(g1: &ColoredGraph, g2: &ColoredGraph) -> Option<Vec<usize>> {
    if g1.len() != g2.len() {
        return None;
    }
    let (c1, c2) = normalized_colors(g1, g2);
    search(g1, c1, g2, c2)
}

/// Group order and a generating set, via a stabilizer chain: at each level
/// the orbit of the first vertex of the smallest cell is found by search.
pub fn automorphism_group(g: &ColoredGraph) -> (u128, Vec<Vec<usize>>) {
    let (mut c, mut c_copy) = normalized_colors(g, g);
    assert!(refine_pair(g, &mut c, g, &mut c_copy));
    let mut order: u128 = 1;
    let mut gens = Vec::new();
    while let Some(col) = target_cell(&c) {
        let v = c.iter().position(|&x| x == col).expect("cell is non-empty");
        let mut orbit = 1u128;
        for w in (0..g.len()).filter(|&w| w != v && c[w] == col) {
            if let Some(p) = search(g, individualize(&c, v), g, individualize(&c, w)) {
                orbit += 1;
                gens.push(p);
            }
        }
        order *= orbit;
        let mut next = individualize(&c, v);
        let mut copy = next.clone();
        assert!(refine_pair(g, &mut next, g, &mut copy));
        c = next;
    }
    (order, gens)
}

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a[b[i]]
    b.iter().map(|&i| a[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> ColoredGraph {
        let mut w = vec![vec![0; n]; n];
        for i in 0..n {
            w[i][(i + 1) % n] = 1;
            w[(i + 1) % n][i] = 1;
        }
        ColoredGraph::new(w, vec![0; n])
    }

    #[test]
    fn dihedral_orders() {
        for n in 3..9 {
            assert_eq!(automorphism_group(&cycle(n)).0, 2 * n as u128);
        }
    }

    #[test]
    fn complete_graph_order() {
        let n = 6;
        let w = (0..n).map(|i| (0..n).map(|j| i64::from(i != j)).collect()).collect();
        assert_eq!(automorphism_group(&ColoredGraph::new(w, vec![0; n])).0, 720);
    }

    #[test]
    fn petersen_order() {
        let mut w = vec![vec![0; 10]; 10];
        let mut e = |a: usize, b: usize| {
            w[a][b] = 1;
            w[b][a] = 1;
        };
        for i in 0..5 {
            e(i, (i + 1) % 5);
            e(i, i + 5);
            e(5 + i, 5 + (i + 2) % 5);
        }
        let g = ColoredGraph::new(w, vec![0; 10]);
        assert_eq!(automorphism_group(&g).0, 120);
    }

    #[test]
    fn isomorphism_respects_colors() {
        let a = cycle(5);
        let mut b = cycle(5);
        assert!(find_isomorphism(&a, &b).is_some());
        b.colors[2] = 7;
        assert!(find_isomorphism(&a, &b).is_none());
    }
}
