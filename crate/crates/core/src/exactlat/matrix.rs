//! Dense integer and rational matrix kernels used by the lattice layer.
//!
//! Everything here is exact: `BigInt` for integer work, `BigRational` for the
//! congruence diagonalization behind [`signature`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Row-major matrix of arbitrary-precision integers.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn is_square(m: &[Vec<BigInt>]) -> bool {
    m.iter().all(|row| row.len() == m.len())
}

pub fn is_symmetric(m: &[Vec<BigInt>]) -> bool {
    is_square(m) && (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &[Vec<BigInt>]) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// `Pᵀ G P` for a change-of-basis matrix whose columns are the new basis.
pub fn congruence(g: &[Vec<BigInt>], p: &[Vec<BigInt>]) -> IntMatrix {
    mat_mul(&mat_mul(&transpose(p), g), p)
}

/// Fraction-free Bareiss elimination. Returns zero for singular input.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Inertia of a real symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.positive, self.negative, self.zero)
    }
}

/// Signature by symmetric Gaussian elimination over ℚ (congruence moves only).
///
/// When every remaining diagonal entry vanishes but an off-diagonal entry
/// `a_ij` does not, row/column `i` is replaced by `i + j`, which puts `2·a_ij`
/// on the diagonal.
pub fn signature(m: &[Vec<BigInt>]) -> Signature {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        let pivot = (k..n).find(|&i| !a[i][i].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => {
                let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                match off {
                    None => break,
                    Some((i, j)) => {
                        // row_i += row_j, then col_i += col_j
                        for c in 0..n {
                            let v = a[j][c].clone();
                            a[i][c] += v;
                        }
                        for r in 0..n {
                            let v = a[r][j].clone();
                            a[r][i] += v;
                        }
                        i
                    }
                }
            }
        };
        if pivot != k {
            a.swap(pivot, k);
            for row in a.iter_mut() {
                row.swap(pivot, k);
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for i in k + 1..n {
            a[k][i] = BigRational::zero();
            a[i][k] = BigRational::zero();
        }
        k += 1;
    }
    Signature {
        positive: pos,
        negative: neg,
        zero: n - pos - neg,
    }
}

pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let (h, _, _) = row_hermite(m);
    h.iter().filter(|row| row.iter().any(|x| !x.is_zero())).count()
}

/// Elementary divisors `d_1 | d_2 | …` of an integer matrix (zeros last for
/// rank-deficient input).
pub fn smith_divisors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: IntMatrix = m.to_vec();
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                out.extend(std::iter::repeat_n(BigInt::zero(), rows.min(cols) - t));
                return out;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Row Hermite normal form `V·A = H` with `V` unimodular.
///
/// Returns `(H, V, V⁻¹)`. Nonzero rows of `H` come first, pivots are positive
/// and entries above each pivot are reduced into `[0, pivot)`. The form is
/// unique, so every caller sees the same basis for the same input.
pub fn row_hermite(m: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: IntMatrix = m.to_vec();
    let mut v = identity(rows);
    let mut vinv = identity(rows);
    let mut r = 0;
    for j in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if a[i][j].is_zero() {
                continue;
            }
            if a[r][j].is_zero() {
                a.swap(r, i);
                v.swap(r, i);
                for row in vinv.iter_mut() {
                    row.swap(r, i);
                }
                continue;
            }
            let ea = a[r][j].clone();
            let eb = a[i][j].clone();
            let ext = ea.extended_gcd(&eb);
            let (g, x, y) = (ext.gcd, ext.x, ext.y);
            let ag = &ea / &g;
            let bg = &eb / &g;
            combine_rows(&mut a, r, i, &x, &y, &bg, &ag);
            combine_rows(&mut v, r, i, &x, &y, &bg, &ag);
            for row in vinv.iter_mut() {
                let cr = row[r].clone();
                let ci = row[i].clone();
                row[r] = &cr * &ag + &ci * &bg;
                row[i] = -(&cr * &y) + &ci * &x;
            }
        }
        if a[r][j].is_zero() {
            continue;
        }
        if a[r][j].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
            for x in v[r].iter_mut() {
                *x = -x.clone();
            }
            for row in vinv.iter_mut() {
                row[r] = -row[r].clone();
            }
        }
        for k in 0..r {
            let q = a[k][j].div_floor(&a[r][j]);
            if q.is_zero() {
                continue;
            }
            sub_row(&mut a, k, r, &q);
            sub_row(&mut v, k, r, &q);
            for row in vinv.iter_mut() {
                let add = &q * &row[k];
                row[r] += add;
            }
        }
        r += 1;
    }
    (a, v, vinv)
}

// rows (r, i) <- (x·r + y·i, -b'·r + a'·i)
fn combine_rows(m: &mut IntMatrix, r: usize, i: usize, x: &BigInt, y: &BigInt, bg: &BigInt, ag: &BigInt) {
    let rr = std::mem::take(&mut m[r]);
    let ri = std::mem::take(&mut m[i]);
    m[r] = rr.iter().zip(&ri).map(|(p, q)| x * p + y * q).collect();
    m[i] = rr.iter().zip(&ri).map(|(p, q)| -(bg * p) + ag * q).collect();
}

// row k -= q · row r
fn sub_row(m: &mut IntMatrix, k: usize, r: usize, q: &BigInt) {
    let src = m[r].clone();
    for (dst, s) in m[k].iter_mut().zip(&src) {
        *dst -= q * s;
    }
}
