//! The projective plane over F4: 21 points, 21 lines, hyperovals and the
//! special point/line configurations behind the MI and MII constructions.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Element of F4 = {0, 1, ω, ω+1} encoded as 0, 1, 2, 3; addition is XOR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct F4(u8);

impl F4 {
    pub const ZERO: F4 = F4(0);
    pub const ONE: F4 = F4(1);
    pub const OMEGA: F4 = F4(2);
    pub const OMEGA_BAR: F4 = F4(3);
    pub const ALL: [F4; 4] = [F4::ZERO, F4::ONE, F4::OMEGA, F4::OMEGA_BAR];

    pub fn new(v: u8) -> F4 {
        assert!(v < 4, "F4 value out of range");
        F4(v)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    fn log(self) -> u8 {
        match self.0 {
            1 => 0,
            2 => 1,
            3 => 2,
            _ => unreachable!("log of zero"),
        }
    }

    pub fn inv(self) -> Option<F4> {
        (!self.is_zero()).then(|| F4([1, 2, 3][((3 - self.log()) % 3) as usize]))
    }
}

impl std::ops::Add for F4 {
    type Output = F4;
    fn add(self, o: F4) -> F4 {
        F4(self.0 ^ o.0)
    }
}

impl std::ops::Mul for F4 {
    type Output = F4;
    fn mul(self, o: F4) -> F4 {
        if self.is_zero() || o.is_zero() {
            return F4::ZERO;
        }
        F4([1, 2, 3][((self.log() + o.log()) % 3) as usize])
    }
}

impl fmt::Display for F4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["0", "1", "w", "w+1"][self.0 as usize])
    }
}

pub type Coords = [F4; 3];

/// Scale so the first nonzero coordinate is 1.
pub fn normalize(v: Coords) -> Option<Coords> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let s = lead.inv()?;
    Some([v[0] * s, v[1] * s, v[2] * s])
}

pub fn dot(a: &Coords, b: &Coords) -> F4 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bitset over the 21 points (or lines).
pub type Mask = u32;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Plane {
    pub points: Vec<Coords>,
    pub lines: Vec<Coords>,
    /// `incidence[p]` is the set of lines through point `p`.
    pub incidence: Vec<Mask>,
    /// `on_line[l]` is the set of points of line `l`.
    pub on_line: Vec<Mask>,
}

pub const N: usize = 21;

pub fn build_plane() -> Plane {
    let mut points: Vec<Coords> = Vec::new();
    for a in F4::ALL {
        for b in F4::ALL {
            for c in F4::ALL {
                if let Some(p) = normalize([a, b, c]) {
                    points.push(p);
                }
            }
        }
    }
    points.sort();
    points.dedup();
    let lines = points.clone();
    let incidence: Vec<Mask> = points
        .iter()
        .map(|p| {
            lines
                .iter()
                .enumerate()
                .filter(|(_, l)| dot(p, l).is_zero())
                .fold(0, |m, (i, _)| m | (1 << i))
        })
        .collect();
    let on_line = (0..lines.len())
        .map(|l| (0..points.len()).filter(|&p| incidence[p] >> l & 1 == 1).fold(0, |m, p| m | (1 << p)))
        .collect();
    Plane {
        points,
        lines,
        incidence,
        on_line,
    }
}

pub fn members(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn mask_of(items: &[usize]) -> Mask {
    items.iter().fold(0, |m, &i| m | (1 << i))
}

impl Plane {
    pub fn points_on(&self, l: usize) -> Vec<usize> {
        members(self.on_line[l])
    }

    pub fn lines_through(&self, p: usize) -> Vec<usize> {
        members(self.incidence[p])
    }

    pub fn incident(&self, p: usize, l: usize) -> bool {
        self.incidence[p] >> l & 1 == 1
    }

    pub fn line_through(&self, p: usize, q: usize) -> usize {
        assert_ne!(p, q);
        (self.incidence[p] & self.incidence[q]).trailing_zeros() as usize
    }

    pub fn meet(&self, l: usize, m: usize) -> usize {
        assert_ne!(l, m);
        (self.on_line[l] & self.on_line[m]).trailing_zeros() as usize
    }

    pub fn meets_in(&self, l: usize, set: Mask) -> u32 {
        (self.on_line[l] & set).count_ones()
    }
}

/// Six points, no three collinear, sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperoval(pub [usize; 6]);

impl Hyperoval {
    pub fn mask(&self) -> Mask {
        mask_of(&self.0)
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(&p)
    }
}

/// All 6-arcs, by backtracking over increasing point ids.
pub fn hyperovals(plane: &Plane) -> Vec<Hyperoval> {
    fn go(plane: &Plane, chosen: &mut Vec<usize>, blocked: Mask, out: &mut Vec<Hyperoval>) {
        if chosen.len() == 6 {
            let mut h = [0; 6];
            h.copy_from_slice(chosen);
            out.push(Hyperoval(h));
            return;
        }
        let start = chosen.last().map_or(0, |&p| p + 1);
        for p in start..N {
            if blocked >> p & 1 == 1 {
                continue;
            }
            let mut nb = blocked;
            for &q in chosen.iter() {
                nb |= plane.on_line[plane.line_through(p, q)];
            }
            chosen.push(p);
            go(plane, chosen, nb, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    go(plane, &mut Vec::new(), 0, &mut out);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlagError {
    #[error("line {0} is out of range")]
    BadLine(usize),
    #[error("points p1..p5 must be the five distinct points of the chosen line")]
    BadPoints,
    #[error("line l[{i}][{j}] = {line} does not pass through p{i} alone among p1..p5")]
    BadPencil { i: usize, j: usize, line: usize },
}

/// A line `ell`, an ordering `p[0..5]` of its points and the pencils
/// `l[i][j]` (i = 0, 1) of the other four lines through `p[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MIIFlag {
    pub ell: usize,
    pub p: [usize; 5],
    pub l: [[usize; 4]; 2],
}

impl MIIFlag {
    pub fn validate(&self, plane: &Plane) -> Result<(), FlagError> {
        if self.ell >= N {
            return Err(FlagError::BadLine(self.ell));
        }
        let mut pts = self.p;
        pts.sort();
        if pts.to_vec() != plane.points_on(self.ell) {
            return Err(FlagError::BadPoints);
        }
        for i in 0..2 {
            for j in 0..4 {
                let line = self.l[i][j];
                let ok = line < N
                    && line != self.ell
                    && self.p.iter().enumerate().all(|(k, &q)| plane.incident(q, line) == (k == i));
                if !ok {
                    return Err(FlagError::BadPencil { i: i + 1, j: j + 1, line });
                }
            }
            let mut ls = self.l[i];
            ls.sort();
            if ls.windows(2).any(|w| w[0] == w[1]) {
                return Err(FlagError::BadPencil { i: i + 1, j: 1, line: ls[0] });
            }
        }
        Ok(())
    }

    /// The point `l[0][i] ∩ l[1][j]`.
    pub fn e(&self, plane: &Plane, i: usize, j: usize) -> usize {
        plane.meet(self.l[0][i], self.l[1][j])
    }

    /// Permutation `i ↦ j` with `E_ij` on line `m` (for `m` through p3, p4 or p5).
    pub fn pencil_permutation(&self, plane: &Plane, m: usize) -> Option<[usize; 4]> {
        let mut sigma = [usize::MAX; 4];
        for (i, s) in sigma.iter_mut().enumerate() {
            let js: Vec<usize> = (0..4).filter(|&j| plane.incident(self.e(plane, i, j), m)).collect();
            if js.len() != 1 {
                return None;
            }
            *s = js[0];
        }
        Some(sigma)
    }

    /// Whether `m` swaps the blocks {1,2} and {3,4} of both pencils.
    pub fn swaps_blocks(&self, plane: &Plane, m: usize) -> bool {
        self.pencil_permutation(plane, m)
            .is_some_and(|s| (0..4).all(|i| s[i] / 2 != i / 2))
    }

    /// Flag on line `ell` with `p1, p2` its first two points, lexicographic
    /// pencils, and `p5` the unique remaining point with a block-swapping line.
    pub fn default_for(plane: &Plane, ell: usize) -> MIIFlag {
        let pts = plane.points_on(ell);
        let pencil = |p: usize| -> [usize; 4] {
            let v: Vec<usize> = plane.lines_through(p).into_iter().filter(|&m| m != ell).collect();
            [v[0], v[1], v[2], v[3]]
        };
        let mut flag = MIIFlag {
            ell,
            p: [pts[0], pts[1], pts[2], pts[3], pts[4]],
            l: [pencil(pts[0]), pencil(pts[1])],
        };
        let rest = [pts[2], pts[3], pts[4]];
        let compatible: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&q| plane.lines_through(q).into_iter().any(|m| m != ell && flag.swaps_blocks(plane, m)))
            .collect();
        assert_eq!(compatible.len(), 1, "exactly one block-compatible point on the flag line");
        let others: Vec<usize> = rest.iter().copied().filter(|&q| q != compatible[0]).collect();
        flag.p = [pts[0], pts[1], others[0], others[1], compatible[0]];
        flag
    }
}

/// Hyperovals through p1, p2 avoiding p3, p4, p5, each pencil line meeting
/// the remaining four points once.
pub fn mii_special_hyperovals(plane: &Plane, flag: &MIIFlag) -> Result<Vec<Hyperoval>, FlagError> {
    flag.validate(plane)?;
    let [p1, p2, p3, p4, p5] = flag.p;
    Ok(hyperovals(plane)
        .into_iter()
        .filter(|h| {
            h.contains(p1) && h.contains(p2) && !h.contains(p3) && !h.contains(p4) && !h.contains(p5) && {
                let rest = h.mask() & !(1 << p1) & !(1 << p2);
                flag.l.iter().flatten().all(|&m| plane.meets_in(m, rest) == 1)
            }
        })
        .collect())
}

/// Nine points meeting every line in 1 or 3 points, with the derived
/// trisecant/tangent split and the four trisecant triangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MIBaseConfig {
    pub base: Vec<usize>,
    pub trisecants: Vec<usize>,
    pub tangents: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
    /// `vertices[k]` are the pairwise meets of triangle `k`'s lines, in line-pair order.
    pub vertices: Vec<[usize; 3]>,
}

impl MIBaseConfig {
    pub fn base_mask(&self) -> Mask {
        mask_of(&self.base)
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        self.vertices.iter().flatten().copied().collect()
    }
}

pub fn mi_base_configurations(plane: &Plane) -> Vec<MIBaseConfig> {
    // lines through each point, as a list
    let through: Vec<Vec<usize>> = (0..N).map(|p| plane.lines_through(p)).collect();
    fn go(plane: &Plane, through: &[Vec<usize>], p: usize, chosen: Mask, count: &mut [u32; N], out: &mut Vec<Mask>) {
        let k = chosen.count_ones();
        if k == 9 {
            if (0..N).all(|l| matches!(count[l], 1 | 3)) {
                out.push(chosen);
            }
            return;
        }
        if p == N || k as usize + (N - p) < 9 {
            return;
        }
        // take p
        if through[p].iter().all(|&l| count[l] < 3) {
            for &l in &through[p] {
                count[l] += 1;
            }
            if feasible(plane, p + 1, count) {
                go(plane, through, p + 1, chosen | (1 << p), count, out);
            }
            for &l in &through[p] {
                count[l] -= 1;
            }
        }
        // skip p
        if feasible(plane, p + 1, count) {
            go(plane, through, p + 1, chosen, count, out);
        }
    }
    // a line whose points are all decided must already hold 1 or 3; others need room to reach 1
    fn feasible(plane: &Plane, next: usize, count: &[u32; N]) -> bool {
        (0..N).all(|l| {
            let undecided = (plane.on_line[l] >> next).count_ones();
            if undecided == 0 {
                matches!(count[l], 1 | 3)
            } else {
                count[l] + undecided >= 1
            }
        })
    }
    let mut masks = Vec::new();
    go(plane, &through, 0, 0, &mut [0; N], &mut masks);
    masks.sort_by_key(|m| members(*m));
    masks.into_iter().map(|m| derive_mi_config(plane, m)).collect()
}

fn derive_mi_config(plane: &Plane, base: Mask) -> MIBaseConfig {
    let trisecants: Vec<usize> = (0..N).filter(|&l| plane.meets_in(l, base) == 3).collect();
    let tangents: Vec<usize> = (0..N).filter(|&l| plane.meets_in(l, base) == 1).collect();
    let mut triangles = Vec::new();
    let mut vertices = Vec::new();
    for (a, &la) in trisecants.iter().enumerate() {
        for (b, &lb) in trisecants.iter().enumerate().skip(a + 1) {
            for &lc in trisecants.iter().skip(b + 1) {
                let pairs = [(la, lb), (la, lc), (lb, lc)];
                if pairs.iter().all(|&(x, y)| base >> plane.meet(x, y) & 1 == 0) {
                    triangles.push([la, lb, lc]);
                    vertices.push(pairs.map(|(x, y)| plane.meet(x, y)));
                }
            }
        }
    }
    MIBaseConfig {
        base: members(base),
        trisecants,
        tangents,
        triangles,
        vertices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for a in F4::ALL {
            assert_eq!(a + F4::ZERO, a);
            assert_eq!(a * F4::ONE, a);
            assert_eq!(a + a, F4::ZERO);
            if let Some(i) = a.inv() {
                assert_eq!(a * i, F4::ONE);
            }
            for b in F4::ALL {
                assert_eq!(a * b, b * a);
                for c in F4::ALL {
                    assert_eq!(a * (b + c), a * b + a * c);
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
        }
        assert_eq!(F4::OMEGA * F4::OMEGA, F4::OMEGA + F4::ONE);
    }

    #[test]
    fn plane_counts() {
        let p = build_plane();
        assert_eq!(p.points.len(), 21);
        assert!(p.on_line.iter().all(|m| m.count_ones() == 5));
        assert!(p.incidence.iter().all(|m| m.count_ones() == 5));
    }

    #[test]
    fn default_flag_is_valid() {
        let plane = build_plane();
        for ell in 0..N {
            let f = MIIFlag::default_for(&plane, ell);
            f.validate(&plane).unwrap();
        }
    }
}
