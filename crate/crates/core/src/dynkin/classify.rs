//! Shape-based recognition of affine Dynkin diagrams, and the spectral test
//! it is checked against.

use super::{AffineType, Family};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Negative semidefinite with one-dimensional kernel, decided by exact
/// symmetric elimination on `−G` (`G` has −2 on the diagonal and the
/// multiplicities off it).
pub fn is_parabolic_spectral(m: &[Vec<i64>], set: &[usize]) -> bool {
    let n = set.len();
    let mut a: Vec<Vec<BigRational>> = set
        .iter()
        .map(|&i| {
            set.iter()
                .map(|&j| {
                    let g = if i == j { -2 } else { m[i][j] };
                    BigRational::from_integer((-g).into())
                })
                .collect()
        })
        .collect();
    let mut corank = 0;
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_negative() {
            return false;
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            corank += 1;
            continue;
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
    }
    corank == 1
}

/// Affine type of a connected vertex set read off its shape alone.
pub fn classify_structural(m: &[Vec<i64>], set: &[usize]) -> Option<AffineType> {
    let n = set.len();
    if n < 2 {
        return None;
    }
    let mut deg = vec![0usize; n];
    let mut edges = 0usize;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            match m[set[a]][set[b]] {
                0 => {}
                1 => deg[a] += 1,
                2 if n == 2 => deg[a] += 1,
                _ => return None,
            }
        }
        edges += deg[a];
    }
    edges /= 2;
    if n == 2 {
        return (m[set[0]][set[1]] == 2).then(|| AffineType::new(Family::A, 1));
    }
    if edges == n && deg.iter().all(|&d| d == 2) {
        return Some(AffineType::new(Family::A, n - 1));
    }
    if edges != n - 1 {
        return None;
    }
    // trees
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&b| b != a && m[set[a]][set[b]] != 0).collect())
        .collect();
    let branch: Vec<usize> = (0..n).filter(|&a| deg[a] >= 3).collect();
    if deg.iter().any(|&d| d > 4) {
        return None;
    }
    match branch.as_slice() {
        [c] if deg[*c] == 4 => (n == 5).then(|| AffineType::new(Family::D, 4)),
        [c] => {
            let mut arms: Vec<usize> = adj[*c].iter().map(|&s| arm_length(&adj, *c, s)).collect();
            arms.sort();
            match arms.as_slice() {
                [2, 2, 2] => Some(AffineType::new(Family::E, 6)),
                [1, 3, 3] => Some(AffineType::new(Family::E, 7)),
                [1, 2, 5] => Some(AffineType::new(Family::E, 8)),
                _ => None,
            }
        }
        [b1, b2] if deg[*b1] == 3 && deg[*b2] == 3 => {
            // D̃_k: each branch node carries two leaves
            let leafy = |b: usize| adj[b].iter().filter(|&&x| deg[x] == 1).count() >= 2;
            (leafy(*b1) && leafy(*b2)).then(|| AffineType::new(Family::D, n - 1))
        }
        _ => None,
    }
}

fn arm_length(adj: &[Vec<usize>], from: usize, start: usize) -> usize {
    let (mut prev, mut cur, mut len) = (from, start, 1);
    loop {
        let next: Vec<usize> = adj[cur].iter().copied().filter(|&x| x != prev).collect();
        match next.as_slice() {
            [] => return len,
            [x] => {
                prev = cur;
                cur = *x;
                len += 1;
            }
            _ => return usize::MAX,
        }
    }
}
