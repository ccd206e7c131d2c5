//! Elliptic K3 configurations with finite Mordell–Weil group: fiber dual
//! graphs, component groups, and the section intersections forced by
//! vanishing heights.

use super::config::{CurveConfigY, FiberData, Role};
use super::QuotientError;
use crate::fibrations::Kodaira;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

/// Dual graph of a reducible fiber: adjacency multiplicities, fiber
/// multiplicities, simple components. Component 0 is always simple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub adjacency: Vec<Vec<i64>>,
    pub multiplicities: Vec<u32>,
    pub simple: Vec<usize>,
}

pub fn dual_graph(kind: Kodaira) -> Result<DualGraph, QuotientError> {
    let empty = |m: usize| vec![vec![0i64; m]; m];
    fn edge(a: &mut [Vec<i64>], i: usize, j: usize) {
        a[i][j] += 1;
        a[j][i] += 1;
    }
    let g = match kind {
        Kodaira::I(n) if n >= 2 => {
            let n = n as usize;
            let mut a = empty(n);
            for i in 0..n {
                edge(&mut a, i, (i + 1) % n);
            }
            DualGraph {
                adjacency: a,
                multiplicities: vec![1; n],
                simple: (0..n).collect(),
            }
        }
        Kodaira::III => return dual_graph(Kodaira::I(2)),
        Kodaira::IV => return dual_graph(Kodaira::I(3)),
        Kodaira::IStar(n) => {
            let n = n as usize;
            let m = n + 5;
            let mut a = empty(m);
            edge(&mut a, 0, 2);
            edge(&mut a, 1, 2);
            for k in 2..n + 2 {
                edge(&mut a, k, k + 1);
            }
            edge(&mut a, n + 2, n + 3);
            edge(&mut a, n + 2, n + 4);
            let mut mult = vec![1, 1];
            mult.extend(std::iter::repeat(2).take(n + 1));
            mult.extend([1, 1]);
            DualGraph {
                adjacency: a,
                multiplicities: mult,
                simple: vec![0, 1, n + 3, n + 4],
            }
        }
        Kodaira::IVStar => {
            // tips 0..3, arms 3..6, center 6
            let mut a = empty(7);
            for k in 0..3 {
                edge(&mut a, k, 3 + k);
                edge(&mut a, 3 + k, 6);
            }
            DualGraph {
                adjacency: a,
                multiplicities: vec![1, 1, 1, 2, 2, 2, 3],
                simple: vec![0, 1, 2],
            }
        }
        Kodaira::IIIStar => {
            let mut a = empty(8);
            for k in 0..6 {
                edge(&mut a, k, k + 1);
            }
            edge(&mut a, 3, 7);
            DualGraph {
                adjacency: a,
                multiplicities: vec![1, 2, 3, 4, 3, 2, 1, 2],
                simple: vec![0, 6],
            }
        }
        Kodaira::IIStar => {
            let mut a = empty(9);
            for k in 0..7 {
                edge(&mut a, k, k + 1);
            }
            edge(&mut a, 5, 8);
            DualGraph {
                adjacency: a,
                multiplicities: vec![1, 2, 3, 4, 5, 6, 4, 2, 3],
                simple: vec![0],
            }
        }
        other => return Err(QuotientError::UnsupportedFiber(other)),
    };
    Ok(g)
}

/// Fiber data for the height pairing: correction terms and the component
/// group, indexed by simple components.
#[derive(Clone, Debug)]
pub struct LocalFiber {
    pub kind: Kodaira,
    pub graph: DualGraph,
    /// `contr[i][j]` for components `i, j` (zero whenever one of them is component 0).
    pub contr: Vec<Vec<Rational64>>,
    /// `sum[a][b]` = index into `graph.simple` of the sum of simple components `a`, `b`.
    pub sum: Vec<Vec<usize>>,
}

fn invert(m: &[Vec<Rational64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular fiber lattice");
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for k in 0..2 * n {
                    let v = a[c][k] * f;
                    a[r][k] -= v;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn frac(x: Rational64) -> Rational64 {
    x - Rational64::from_integer(x.numer().div_floor(x.denom()))
}

impl LocalFiber {
    pub fn new(kind: Kodaira) -> Result<Self, QuotientError> {
        let graph = dual_graph(kind)?;
        let m = graph.adjacency.len();
        let rest: Vec<usize> = (1..m).collect();
        let g: Vec<Vec<Rational64>> = rest
            .iter()
            .map(|&i| {
                rest.iter()
                    .map(|&j| Rational64::from_integer(if i == j { -2 } else { graph.adjacency[i][j] }))
                    .collect()
            })
            .collect();
        let inv = invert(&g);
        let mut contr = vec![vec![Rational64::zero(); m]; m];
        for (a, &i) in rest.iter().enumerate() {
            for (b, &j) in rest.iter().enumerate() {
                contr[i][j] = -inv[a][b];
            }
        }
        let class = |c: usize| -> Vec<Rational64> {
            if c == 0 {
                vec![Rational64::zero(); rest.len()]
            } else {
                (0..rest.len()).map(|k| frac(inv[k][c - 1])).collect()
            }
        };
        let classes: Vec<Vec<Rational64>> = graph.simple.iter().map(|&c| class(c)).collect();
        let sum = classes
            .iter()
            .map(|x| {
                classes
                    .iter()
                    .map(|y| {
                        let s: Vec<Rational64> = x.iter().zip(y).map(|(a, b)| frac(a + b)).collect();
                        classes.iter().position(|c| *c == s).expect("component group is closed")
                    })
                    .collect()
            })
            .collect();
        Ok(LocalFiber { kind, graph, contr, sum })
    }

    /// Order of simple component `a` (index into `graph.simple`) in the component group.
    pub fn order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.sum[x][a];
            k += 1;
        }
        k
    }
}

/// A torsion solution: the images of the generators and all section data.
#[derive(Clone, Debug)]
pub struct TorsionSolution {
    /// `images[t][v]` = simple-component index hit by element `t` on fiber `v`.
    pub images: Vec<Vec<usize>>,
    /// Group elements in enumeration order (coefficients of the generators).
    pub elements: Vec<Vec<usize>>,
    /// Intersection numbers between distinct sections.
    pub section_pairs: Vec<Vec<i64>>,
}

fn elements_of(torsion: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &o in torsion {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..o).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

fn cartesian(options: &[Vec<usize>]) -> Vec<Vec<usize>> {
    options.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|p| {
                opts.iter().map(move |&o| {
                    let mut q = p.clone();
                    q.push(o);
                    q
                })
            })
            .collect()
    })
}

/// Every injective homomorphism `T → Π(component groups)` whose sections
/// have vanishing height and non-negative integral mutual intersections.
pub fn torsion_solutions(fibers: &[Kodaira], torsion: &[usize]) -> Result<Vec<TorsionSolution>, QuotientError> {
    let locs: Vec<LocalFiber> = fibers.iter().map(|&k| LocalFiber::new(k)).collect::<Result<_, _>>()?;
    let excess: u32 = fibers.iter().map(|k| k.components() - 1).sum();
    if excess > 20 {
        return Err(QuotientError::Precondition(format!("fiber components exceed the Picard budget ({excess} > 20)")));
    }
    let order: usize = torsion.iter().product();
    let disc: u64 = fibers.iter().map(|k| u64::from(k.discriminant())).product();
    if excess == 20 && (order as u64).pow(2) * 4 != disc {
        return Err(QuotientError::Precondition(format!(
            "|T|² · 4 = {} differs from the product of discriminants {disc}",
            (order as u64).pow(2) * 4
        )));
    }
    let elements = elements_of(torsion);
    // per generator, per fiber: simple components whose order divides the generator order
    let gen_options: Vec<Vec<Vec<usize>>> = torsion
        .iter()
        .map(|&o| {
            cartesian(
                &locs
                    .iter()
                    .map(|l| (0..l.graph.simple.len()).filter(|&a| o % l.order(a) == 0).collect())
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; torsion.len()];
    loop {
        let gens: Vec<&Vec<usize>> = choice.iter().zip(&gen_options).map(|(&c, o)| &o[c]).collect();
        if let Some(sol) = try_generators(&locs, &elements, &gens) {
            out.push(sol);
        }
        let mut pos = 0;
        while pos < choice.len() {
            choice[pos] += 1;
            if choice[pos] < gen_options[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == choice.len() {
            break;
        }
    }
    Ok(out)
}

fn try_generators(locs: &[LocalFiber], elements: &[Vec<usize>], gens: &[&Vec<usize>]) -> Option<TorsionSolution> {
    let images: Vec<Vec<usize>> = elements
        .iter()
        .map(|t| {
            locs.iter()
                .enumerate()
                .map(|(v, l)| {
                    let mut x = 0;
                    for (g, &k) in gens.iter().zip(t) {
                        for _ in 0..k {
                            x = l.sum[x][g[v]];
                        }
                    }
                    x
                })
                .collect()
        })
        .collect();
    let mut seen = images.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != images.len() {
        return None;
    }
    let comp = |v: usize, a: usize| locs[v].graph.simple[a];
    let n = elements.len();
    // zero-section intersections
    let mut po = vec![0i64; n];
    for t in 1..n {
        let s: Rational64 = (0..locs.len()).map(|v| locs[v].contr[comp(v, images[t][v])][comp(v, images[t][v])]).sum();
        let x = (s - Rational64::from_integer(4)) / Rational64::from_integer(2);
        if !x.is_integer() || x < Rational64::zero() {
            return None;
        }
        po[t] = x.to_integer();
    }
    let mut pairs = vec![vec![-2i64; n]; n];
    for t in 1..n {
        pairs[0][t] = po[t];
        pairs[t][0] = po[t];
    }
    for a in 1..n {
        for b in a + 1..n {
            let s: Rational64 = (0..locs.len()).map(|v| locs[v].contr[comp(v, images[a][v])][comp(v, images[b][v])]).sum();
            let x = Rational64::from_integer(2 + po[a] + po[b]) - s;
            if !x.is_integer() || x < Rational64::zero() {
                return None;
            }
            pairs[a][b] = x.to_integer();
            pairs[b][a] = pairs[a][b];
        }
    }
    Some(TorsionSolution {
        images,
        elements: elements.to_vec(),
        section_pairs: pairs,
    })
}

/// Curve configuration of the first torsion solution.
pub fn torsion_section_model(fibers: &[Kodaira], torsion: &[usize]) -> Result<CurveConfigY, QuotientError> {
    let sols = torsion_solutions(fibers, torsion)?;
    let sol = sols.first().ok_or_else(|| QuotientError::Infeasible(format!("no torsion structure {torsion:?} on {fibers:?}")))?;
    config_from_solution(fibers, sol)
}

pub fn config_from_solution(fibers: &[Kodaira], sol: &TorsionSolution) -> Result<CurveConfigY, QuotientError> {
    let graphs: Vec<DualGraph> = fibers.iter().map(|&k| dual_graph(k)).collect::<Result<_, _>>()?;
    let ncomp: usize = graphs.iter().map(|g| g.adjacency.len()).sum();
    let nsec = sol.elements.len();
    let n = ncomp + nsec;
    let mut gram = vec![vec![0i64; n]; n];
    let mut labels = Vec::with_capacity(n);
    let mut roles = Vec::with_capacity(n);
    let mut data = Vec::new();
    let mut offset = 0;
    for (f, (g, &kind)) in graphs.iter().zip(fibers).enumerate() {
        let m = g.adjacency.len();
        for i in 0..m {
            labels.push(format!("C{}.{}", f + 1, i));
            roles.push(Role::Fiber { fiber: f, position: i });
            for j in 0..m {
                gram[offset + i][offset + j] = if i == j { -2 } else { g.adjacency[i][j] };
            }
        }
        data.push(FiberData {
            kind,
            components: (offset..offset + m).collect(),
            multiplicities: g.multiplicities.clone(),
        });
        offset += m;
    }
    for (t, el) in sol.elements.iter().enumerate() {
        let name = if t == 0 {
            "O".to_string()
        } else {
            format!("P{}", el.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
        };
        labels.push(name);
        roles.push(Role::Section { id: t });
        let s = ncomp + t;
        for (v, fd) in data.iter().enumerate() {
            let c = fd.components[graphs[v].simple[sol.images[t][v]]];
            gram[s][c] = 1;
            gram[c][s] = 1;
        }
        for u in 0..nsec {
            gram[s][ncomp + u] = sol.section_pairs[t][u];
        }
    }
    Ok(CurveConfigY {
        labels,
        gram,
        roles,
        fibers: data,
        ns_index: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_groups() {
        let order = |k: Kodaira| {
            let l = LocalFiber::new(k).unwrap();
            (0..l.graph.simple.len()).map(|a| l.order(a)).max().unwrap()
        };
        assert_eq!(order(Kodaira::I(6)), 6);
        assert_eq!(order(Kodaira::IStar(1)), 4);
        assert_eq!(order(Kodaira::IStar(2)), 2);
        assert_eq!(order(Kodaira::IVStar), 3);
        assert_eq!(order(Kodaira::IIIStar), 2);
        assert_eq!(order(Kodaira::IIStar), 1);
    }

    #[test]
    fn corrections_on_cycle() {
        let l = LocalFiber::new(Kodaira::I(5)).unwrap();
        // i(n−i)/n on the diagonal
        for i in 1..5 {
            assert_eq!(l.contr[i][i], Rational64::new((i * (5 - i)) as i64, 5));
        }
    }
}
