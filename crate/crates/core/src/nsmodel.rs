//! The Néron–Severi lattice of the supersingular K3 surface of Artin
//! invariant 1, spanned by 21 exceptional curves `E_p` over the points of
//! PG(2,4) and 21 line transforms `L_l`.
//!
//! Generator order: `E_0..E_20`, then `L_0..L_20` (index `21 + l`).

use crate::exactlat::{self, generated_lattice_i64, DiscriminantData, GeneratedLattice, Lattice, LatticeVector};
use crate::pg4::{Hyperoval, Plane, N};
use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

pub const GENERATORS: usize = 2 * N;

pub fn e_index(p: usize) -> usize {
    p
}

pub fn l_index(l: usize) -> usize {
    N + l
}

pub fn label(i: usize) -> String {
    if i < N {
        format!("E{i}")
    } else {
        format!("L{}", i - N)
    }
}

pub fn parse_label(s: &str) -> Option<usize> {
    let (head, rest) = s.split_at(1);
    let k: usize = rest.parse().ok()?;
    if k >= N {
        return None;
    }
    match head {
        "E" => Some(e_index(k)),
        "L" => Some(l_index(k)),
        _ => None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NsError {
    #[error("points {0:?} are not six points in general position")]
    NotHyperoval(Vec<usize>),
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
}

/// A divisor class: generator coordinates plus the canonical reduction in
/// the induced basis. Equality is decided on the reduction.
#[derive(Clone, Debug, Serialize)]
pub struct NSClass {
    pub coords: Vec<i64>,
    #[serde(with = "crate::json::big_vec")]
    pub reduced: Vec<BigInt>,
}

impl PartialEq for NSClass {
    fn eq(&self, other: &Self) -> bool {
        self.reduced == other.reduced
    }
}

impl Eq for NSClass {}

#[derive(Clone, Debug)]
pub struct NSModel {
    pub gram42: Vec<Vec<i64>>,
    pub induced: GeneratedLattice,
    pub plane: Plane,
}

pub fn gram42(plane: &Plane) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; GENERATORS]; GENERATORS];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = -2;
    }
    for p in 0..N {
        for l in 0..N {
            if plane.incident(p, l) {
                g[e_index(p)][l_index(l)] = 1;
                g[l_index(l)][e_index(p)] = 1;
            }
        }
    }
    g
}

pub fn build_ns_model(plane: &Plane) -> NSModel {
    let g = gram42(plane);
    let induced = generated_lattice_i64(&g).expect("generator gram is symmetric and even");
    NSModel {
        gram42: g,
        induced,
        plane: plane.clone(),
    }
}

impl NSModel {
    pub fn lattice(&self) -> &Lattice {
        &self.induced.lattice
    }

    pub fn discriminant(&self) -> DiscriminantData {
        self.lattice().smith_invariants()
    }

    pub fn class(&self, coords: Vec<i64>) -> NSClass {
        let reduced = self.induced.project_i64(&coords);
        NSClass { coords, reduced }
    }

    pub fn generator(&self, i: usize) -> NSClass {
        let mut c = vec![0; GENERATORS];
        c[i] = 1;
        self.class(c)
    }

    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        pair_with(&self.gram42, a, b)
    }

    pub fn pair_generator(&self, a: &[i64], i: usize) -> i64 {
        a.iter().zip(&self.gram42[i]).map(|(x, g)| x * g).sum()
    }

    /// `h = 2 L_l + Σ_{p ∈ l} E_p`.
    pub fn class_h(&self, l: usize) -> NSClass {
        self.class(h_coords(&self.plane, l))
    }

    /// `r_S = 2h − Σ_{p∈S} E_p`, norm −4.
    pub fn minus_four_vector(&self, points: &[usize]) -> Result<NSClass, NsError> {
        let mut s = points.to_vec();
        s.sort();
        s.dedup();
        let general = s.len() == 6
            && s.iter().all(|&p| p < N)
            && (0..N).all(|l| self.plane.meets_in(l, crate::pg4::mask_of(&s)) <= 2);
        if !general {
            return Err(NsError::NotHyperoval(points.to_vec()));
        }
        let mut c: Vec<i64> = h_coords(&self.plane, 0).iter().map(|x| 2 * x).collect();
        for &p in &s {
            c[e_index(p)] -= 1;
        }
        Ok(self.class(c))
    }

    pub fn hyperoval_class(&self, h: &Hyperoval) -> NSClass {
        self.minus_four_vector(&h.0).expect("hyperovals are in general position")
    }

    /// Induced-basis vector of a class, for exact lattice operations.
    pub fn vector(&self, c: &NSClass) -> LatticeVector {
        LatticeVector::new(c.reduced.clone())
    }

    /// Keep classes orthogonal to every listed generator.
    pub fn orthogonal_filter<'a>(&self, vectors: &'a [NSClass], curves: &[usize]) -> Vec<&'a NSClass> {
        vectors
            .iter()
            .filter(|v| curves.iter().all(|&c| self.pair_generator(&v.coords, c) == 0))
            .collect()
    }

    pub fn orthogonal_filter_labels<'a>(&self, vectors: &'a [NSClass], curves: &[&str]) -> Result<Vec<&'a NSClass>, NsError> {
        let idx = curves
            .iter()
            .map(|s| parse_label(s).ok_or_else(|| NsError::UnknownLabel(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.orthogonal_filter(vectors, &idx))
    }

    pub fn reflect(&self, x: &NSClass, delta: &NSClass) -> Result<LatticeVector, exactlat::LatticeError> {
        exactlat::reflect(&self.vector(x), &self.vector(delta), self.lattice())
    }
}

pub fn h_coords(plane: &Plane, l: usize) -> Vec<i64> {
    let mut c = vec![0i64; GENERATORS];
    c[l_index(l)] = 2;
    for p in plane.points_on(l) {
        c[e_index(p)] += 1;
    }
    c
}

pub fn pair_with(g: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                acc += x * g[i][j] * y;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pg4::build_plane;

    #[test]
    fn labels_round_trip() {
        for i in 0..GENERATORS {
            assert_eq!(parse_label(&label(i)), Some(i));
        }
        assert_eq!(parse_label("X3"), None);
        assert_eq!(parse_label("E21"), None);
    }

    #[test]
    fn non_general_set_rejected() {
        let plane = build_plane();
        let m = build_ns_model(&plane);
        let mut pts = plane.points_on(0);
        pts.push(plane.points_on(1).into_iter().find(|p| !pts.contains(p)).unwrap());
        assert!(m.minus_four_vector(&pts).is_err());
    }
}
