//! Exact integral lattices.
//!
//! Root lattices are stored negative definite: `A_n`, `D_n`, `E_n` carry the
//! negated Cartan matrix, so every root has norm −2.

pub mod matrix;
mod parse;

use matrix::{determinant, row_hermite, smith_divisors, IntMatrix};
pub use matrix::{signature, Signature};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{hyperbolic_plane, root_lattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("parse error at position {position}: unexpected token `{token}`")]
    Parse { position: usize, token: String },
    #[error("gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("gram matrix has an odd diagonal entry at index {0}")]
    Odd(usize),
    #[error("gram matrix is degenerate (rank {rank} of {size}); use generated_lattice for generating sets")]
    Degenerate { rank: usize, size: usize },
    #[error("label count {labels} does not match rank {rank}")]
    LabelMismatch { labels: usize, rank: usize },
    #[error("twist multiplier must be nonzero")]
    ZeroTwist,
    #[error("vector length {got} does not match lattice rank {rank}")]
    Length { got: usize, rank: usize },
    #[error("reflection root must have norm -2 or -4, got {0}")]
    BadRoot(BigInt),
    #[error("reflection in a (-4)-vector is not integral: pairing {0} is odd")]
    NonIntegralReflection(BigInt),
}

/// A non-degenerate even lattice given by a Gram matrix on a labeled basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    labels: Vec<String>,
    #[serde(with = "crate::json::big_matrix")]
    gram: IntMatrix,
}

/// Elementary divisors and determinant of a Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantData {
    #[serde(with = "crate::json::big_vec")]
    pub elementary_divisors: Vec<BigInt>,
    #[serde(with = "crate::json::big")]
    pub det: BigInt,
    pub two_elementary_a: Option<usize>,
}

impl DiscriminantData {
    /// Invariant factors of the discriminant group (divisors greater than one).
    pub fn group(&self) -> Vec<BigInt> {
        self.elementary_divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Integer coordinates in the basis of some lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "crate::json::big_vec")]
    pub coords: Vec<BigInt>,
}

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }
}

impl Lattice {
    pub fn new(labels: Vec<String>, gram: IntMatrix) -> Result<Self, LatticeError> {
        if !matrix::is_symmetric(&gram) {
            return Err(LatticeError::NotSymmetric);
        }
        if labels.len() != gram.len() {
            return Err(LatticeError::LabelMismatch {
                labels: labels.len(),
                rank: gram.len(),
            });
        }
        if let Some(i) = (0..gram.len()).find(|&i| gram[i][i].is_odd()) {
            return Err(LatticeError::Odd(i));
        }
        if determinant(&gram).is_zero() {
            return Err(LatticeError::Degenerate {
                rank: matrix::rank(&gram),
                size: gram.len(),
            });
        }
        Ok(Lattice { labels, gram })
    }

    pub fn from_i64(labels: Vec<String>, gram: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Lattice::new(labels, matrix::to_big(gram))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn det(&self) -> BigInt {
        determinant(&self.gram)
    }

    pub fn signature(&self) -> Signature {
        signature(&self.gram)
    }

    pub fn smith_invariants(&self) -> DiscriminantData {
        let elementary_divisors = smith_divisors(&self.gram);
        let nontrivial: Vec<&BigInt> = elementary_divisors.iter().filter(|d| !d.is_one()).collect();
        let two = BigInt::from(2);
        let two_elementary_a = nontrivial.iter().all(|d| **d == two).then_some(nontrivial.len());
        DiscriminantData {
            det: self.det(),
            elementary_divisors,
            two_elementary_a,
        }
    }

    /// `L(m)`: every Gram entry multiplied by `m`.
    pub fn twist(&self, m: &BigInt) -> Result<Lattice, LatticeError> {
        if m.is_zero() {
            return Err(LatticeError::ZeroTwist);
        }
        let gram = self.gram.iter().map(|row| row.iter().map(|x| x * m).collect()).collect();
        Lattice::new(self.labels.clone(), gram)
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let k = other.rank();
        let mut gram = vec![vec![BigInt::zero(); n + k]; n + k];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..k {
            for j in 0..k {
                gram[n + i][n + j] = other.gram[i][j].clone();
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Lattice { labels, gram }
    }

    pub fn pairing(&self, x: &LatticeVector, y: &LatticeVector) -> Result<BigInt, LatticeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(bilinear(&self.gram, &x.coords, &y.coords))
    }

    fn check(&self, x: &LatticeVector) -> Result<(), LatticeError> {
        if x.coords.len() == self.rank() {
            Ok(())
        } else {
            Err(LatticeError::Length {
                got: x.coords.len(),
                rank: self.rank(),
            })
        }
    }
}

pub fn bilinear(g: &[Vec<BigInt>], x: &[BigInt], y: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() && !g[i][j].is_zero() {
                acc += xi * &g[i][j] * yj;
            }
        }
    }
    acc
}

/// Parse and assemble a lattice expression such as `"(U + E8)(2)"`.
pub fn build_lattice(expr: &str) -> Result<Lattice, LatticeError> {
    parse::parse(expr)
}

/// The lattice spanned by a generating multiset with Gram matrix `g`.
#[derive(Clone, Debug)]
pub struct GeneratedLattice {
    pub rank: usize,
    pub lattice: Lattice,
    /// `rank × generators`; column `i` is generator `i` in the induced basis.
    projection: IntMatrix,
    /// Rows of the unimodular transform whose leading `rank` rows are the basis.
    basis_rows: IntMatrix,
}

impl GeneratedLattice {
    /// Coordinates in the induced basis of the class with generator coordinates `x`.
    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.rank)
            .map(|r| {
                x.iter()
                    .zip(&self.projection[r])
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn project_i64(&self, x: &[i64]) -> Vec<BigInt> {
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.project(&big)
    }

    /// Basis vector `k` expressed in generator coordinates.
    pub fn basis_in_generators(&self, k: usize) -> &[BigInt] {
        &self.basis_rows[k]
    }
}

/// Induced lattice of a (possibly degenerate) Gram matrix of generators.
///
/// Row-reduces `V·G = H`. The first `rank` rows of `V` span a complement of
/// the radical and become the basis; `V⁻¹` truncated to those columns maps
/// generator coordinates into it.
pub fn generated_lattice(g: &[Vec<BigInt>]) -> Result<GeneratedLattice, LatticeError> {
    if !matrix::is_symmetric(g) {
        return Err(LatticeError::NotSymmetric);
    }
    let (h, v, vinv) = row_hermite(g);
    let rank = h.iter().take_while(|row| row.iter().any(|x| !x.is_zero())).count();
    let gram: IntMatrix = (0..rank)
        .map(|j| {
            (0..rank)
                .map(|k| h[j].iter().zip(&v[k]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let projection: IntMatrix = (0..rank).map(|r| vinv.iter().map(|row| row[r].clone()).collect()).collect();
    let labels = (0..rank).map(|i| format!("b{i}")).collect();
    let lattice = Lattice::new(labels, gram)?;
    Ok(GeneratedLattice {
        rank,
        lattice,
        projection,
        basis_rows: v.into_iter().take(rank).collect(),
    })
}

pub fn generated_lattice_i64(g: &[Vec<i64>]) -> Result<GeneratedLattice, LatticeError> {
    generated_lattice(&matrix::to_big(g))
}

/// `s_δ(x) = x − 2⟨x,δ⟩/⟨δ,δ⟩ · δ` for roots of norm −2 or −4.
pub fn reflect(x: &LatticeVector, delta: &LatticeVector, lat: &Lattice) -> Result<LatticeVector, LatticeError> {
    let dd = lat.pairing(delta, delta)?;
    let xd = lat.pairing(x, delta)?;
    let coeff = match dd.to_i64() {
        Some(-2) => xd,
        Some(-4) => {
            if xd.is_odd() {
                return Err(LatticeError::NonIntegralReflection(xd));
            }
            xd / 2
        }
        _ => return Err(LatticeError::BadRoot(dd)),
    };
    let coords = x.coords.iter().zip(&delta.coords).map(|(a, d)| a + &coeff * d).collect();
    Ok(LatticeVector { coords })
}

/// Absolute value of a determinant, for index computations.
pub fn abs_det(g: &[Vec<BigInt>]) -> BigInt {
    determinant(g).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn catalog_determinants() {
        for (expr, det) in [("A1", -2), ("A2", 3), ("A5", -6), ("D4", 4), ("D5", -4), ("E6", 3), ("E7", -2), ("E8", 1), ("U", -1)] {
            assert_eq!(build_lattice(expr).unwrap().det(), b(det), "{expr}");
        }
    }

    #[test]
    fn e10_twisted() {
        let l = build_lattice("(U + E8)(2)").unwrap();
        assert_eq!(l.rank(), 10);
        assert_eq!(l.det().abs(), b(1024));
        let d = l.smith_invariants();
        assert_eq!(d.two_elementary_a, Some(10));
    }

    #[test]
    fn parse_errors_name_token() {
        match build_lattice("A1 + F4") {
            Err(LatticeError::Parse { token, .. }) => assert_eq!(token, "F4"),
            other => panic!("{other:?}"),
        }
        match build_lattice("A1(0)") {
            Err(LatticeError::Parse { token, .. }) => assert_eq!(token, "0"),
            other => panic!("{other:?}"),
        }
        assert!(build_lattice("(A1").is_err());
        assert!(build_lattice("").is_err());
    }

    #[test]
    fn degenerate_rejected() {
        let g = matrix::to_big(&[vec![-2, -2], vec![-2, -2]]);
        assert!(matches!(Lattice::new(vec!["a".into(), "b".into()], g), Err(LatticeError::Degenerate { rank: 1, .. })));
    }

    #[test]
    fn generated_from_repeated_root() {
        let g = matrix::to_big(&[vec![-2, -2, -2], vec![-2, -2, -2], vec![-2, -2, -2]]);
        let gl = generated_lattice(&g).unwrap();
        assert_eq!(gl.rank, 1);
        assert_eq!(gl.lattice.gram()[0][0], b(-2));
        assert_eq!(gl.project_i64(&[1, 1, 0]).len(), 1);
        assert_eq!(gl.project_i64(&[1, -1, 0]), vec![b(0)]);
    }

    #[test]
    fn reflection_basics() {
        let l = build_lattice("A2").unwrap();
        let d = LatticeVector::from_i64(&[1, 0]);
        assert_eq!(reflect(&d, &d, &l).unwrap(), LatticeVector::from_i64(&[-1, 0]));
        let u = build_lattice("U + A1").unwrap();
        let x = LatticeVector::from_i64(&[1, 1, 0]);
        let r = LatticeVector::from_i64(&[0, 0, 1]);
        assert_eq!(reflect(&x, &r, &u).unwrap(), x);
        let l4 = build_lattice("A1(2) + U").unwrap();
        let delta = LatticeVector::from_i64(&[1, 0, 0]);
        let odd = LatticeVector::from_i64(&[0, 0, 0]);
        assert_eq!(reflect(&odd, &delta, &l4).unwrap(), odd);
        let l = build_lattice("A1(2) + A1").unwrap();
        assert!(reflect(&LatticeVector::from_i64(&[0, 1]), &LatticeVector::from_i64(&[1, 0]), &l).is_ok());
        let g = matrix::to_big(&[vec![-4, 1], vec![1, -2]]);
        let l = Lattice::new(vec!["d".into(), "x".into()], g).unwrap();
        assert!(matches!(
            reflect(&LatticeVector::from_i64(&[0, 1]), &LatticeVector::from_i64(&[1, 0]), &l),
            Err(LatticeError::NonIntegralReflection(_))
        ));
    }
}
