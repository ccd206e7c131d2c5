//! K3-side curve configurations: fibers, sections and integral-curve choices.

use super::torsion::{dual_graph, torsion_section_model};
use super::{QuotientError, SurfaceKind};
use crate::fibrations::Kodaira;
use crate::nsmodel::{self, e_index, l_index, NSModel};
use crate::pg4::{mi_base_configurations, MIBaseConfig, MIIFlag, Plane};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    Fiber { fiber: usize, position: usize },
    Section { id: usize },
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberData {
    pub kind: Kodaira,
    /// Curve indices in the layout order of [`dual_graph`].
    pub components: Vec<usize>,
    pub multiplicities: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveConfigY {
    pub labels: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    pub roles: Vec<Role>,
    pub fibers: Vec<FiberData>,
    /// Generator index in the 42-curve model, when the curves come from it.
    pub ns_index: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralSet {
    /// Integral curves; contracted first.
    pub members: Vec<usize>,
    /// Non-integral curves contracted afterwards, in order.
    pub secondary: Vec<usize>,
}

impl IntegralSet {
    pub fn contracted(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().chain(&self.secondary).copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }
}

impl CurveConfigY {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn sections(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| matches!(self.roles[i], Role::Section { .. })).collect()
    }

    /// `Σ mult · (x · C)` over the fiber's components.
    pub fn fiber_degree(&self, fiber: usize, x: usize) -> i64 {
        let f = &self.fibers[fiber];
        f.components.iter().zip(&f.multiplicities).map(|(&c, &m)| i64::from(m) * self.gram[x][c]).sum()
    }

    /// Structural checks: Gram shape, fiber dual graphs, disjoint fibers,
    /// and every section meeting every fiber once.
    pub fn validate(&self) -> Result<(), QuotientError> {
        let n = self.len();
        let bad = |m: String| Err(QuotientError::Structure(m));
        if self.gram.len() != n || self.roles.len() != n || self.gram.iter().any(|r| r.len() != n) {
            return bad("gram/labels/roles size mismatch".into());
        }
        for i in 0..n {
            if self.gram[i][i] != -2 {
                return bad(format!("{} has self-intersection {}", self.labels[i], self.gram[i][i]));
            }
            for j in 0..n {
                if self.gram[i][j] != self.gram[j][i] {
                    return bad(format!("gram not symmetric at {},{}", self.labels[i], self.labels[j]));
                }
            }
        }
        for (f, fd) in self.fibers.iter().enumerate() {
            let g = dual_graph(fd.kind)?;
            if g.adjacency.len() != fd.components.len() || g.multiplicities != fd.multiplicities {
                return bad(format!("fiber {f} does not have the {} layout", fd.kind));
            }
            for (a, &i) in fd.components.iter().enumerate() {
                for (b, &j) in fd.components.iter().enumerate() {
                    if a != b && self.gram[i][j] != g.adjacency[a][b] {
                        return bad(format!("fiber {f}: {} · {} ≠ {}", self.labels[i], self.labels[j], g.adjacency[a][b]));
                    }
                }
            }
            for (h, other) in self.fibers.iter().enumerate().skip(f + 1) {
                for &i in &fd.components {
                    for &j in &other.components {
                        if self.gram[i][j] != 0 {
                            return bad(format!("fibers {f} and {h} meet at {} · {}", self.labels[i], self.labels[j]));
                        }
                    }
                }
            }
        }
        for s in self.sections() {
            for f in 0..self.fibers.len() {
                let d = self.fiber_degree(f, s);
                if d != 1 {
                    return bad(format!("section {} meets fiber {f} with multiplicity {d}", self.labels[s]));
                }
            }
        }
        Ok(())
    }
}

/// The twelve MII named lines through `p3, p4, p5` other than `ℓ`, with
/// `F1, F2` the first block-swapping pair through `p5`.
struct MiiNames {
    flag: MIIFlag,
    f: [usize; 2],
}

fn mii_names(plane: &Plane, flag: MIIFlag) -> Result<MiiNames, QuotientError> {
    let p5 = flag.p[4];
    let swaps: Vec<usize> = plane
        .lines_through(p5)
        .into_iter()
        .filter(|&m| m != flag.ell && flag.swaps_blocks(plane, m))
        .collect();
    if swaps.len() < 2 {
        return Err(QuotientError::Structure(format!("only {} block-swapping lines through p5", swaps.len())));
    }
    Ok(MiiNames {
        flag,
        f: [swaps[0], swaps[1]],
    })
}

/// Block-swapping lines through `p5` (the admissible `F1, F2` candidates).
pub fn mii_f_candidates(plane: &Plane, flag: &MIIFlag) -> Vec<usize> {
    plane
        .lines_through(flag.p[4])
        .into_iter()
        .filter(|&m| m != flag.ell && flag.swaps_blocks(plane, m))
        .collect()
}

fn from_generators(ns: &NSModel, order: Vec<(usize, String)>, roles: Vec<Role>, fibers: Vec<FiberData>) -> CurveConfigY {
    let idx: Vec<usize> = order.iter().map(|o| o.0).collect();
    let gram = idx.iter().map(|&i| idx.iter().map(|&j| ns.gram42[i][j]).collect()).collect();
    CurveConfigY {
        labels: order.into_iter().map(|o| o.1).collect(),
        gram,
        roles,
        fibers,
        ns_index: Some(idx),
    }
}

/// MI: four hexagons alternating triangle lines and their vertices, the
/// nine base-point exceptionals and the nine tangent-line transforms.
pub fn mi_config(ns: &NSModel, base: &MIBaseConfig) -> CurveConfigY {
    let mut order = Vec::new();
    let mut roles = Vec::new();
    let mut fibers = Vec::new();
    for (k, (tri, v)) in base.triangles.iter().zip(&base.vertices).enumerate() {
        // vertices are [ab, ac, bc]
        let hex = [l_index(tri[0]), e_index(v[0]), l_index(tri[1]), e_index(v[2]), l_index(tri[2]), e_index(v[1])];
        let start = order.len();
        for (pos, &g) in hex.iter().enumerate() {
            order.push((g, nsmodel::label(g)));
            roles.push(Role::Fiber { fiber: k, position: pos });
        }
        fibers.push(FiberData {
            kind: Kodaira::I(6),
            components: (start..start + 6).collect(),
            multiplicities: vec![1; 6],
        });
    }
    let sections = base.base.iter().map(|&p| e_index(p)).chain(base.tangents.iter().map(|&l| l_index(l)));
    for (id, g) in sections.enumerate() {
        order.push((g, nsmodel::label(g)));
        roles.push(Role::Section { id });
    }
    from_generators(ns, order, roles, fibers)
}

/// MII: the (I8, I8, I1*) fibration on the 42 curves, with named curves.
pub fn mii_config(ns: &NSModel, flag: &MIIFlag) -> Result<CurveConfigY, QuotientError> {
    let plane = &ns.plane;
    flag.validate(plane).map_err(|e| QuotientError::Structure(e.to_string()))?;
    let names = mii_names(plane, flag.clone())?;
    let fl = &names.flag;
    let lij = |i: usize, j: usize| (l_index(fl.l[i - 1][j - 1]), format!("L{i}{j}"));
    let eij = |i: usize, j: usize| (e_index(fl.e(plane, i - 1, j - 1)), format!("E{i}{j}"));
    let p = |k: usize| (e_index(fl.p[k - 1]), format!("E{k}"));
    let i8a = vec![lij(1, 1), eij(1, 1), lij(2, 1), eij(2, 1), lij(1, 2), eij(2, 2), lij(2, 2), eij(1, 2)];
    let i8b = vec![lij(1, 3), eij(3, 3), lij(2, 3), eij(4, 3), lij(1, 4), eij(4, 4), lij(2, 4), eij(3, 4)];
    let istar = vec![
        p(3),
        p(4),
        (l_index(fl.ell), "L".to_string()),
        p(5),
        (l_index(names.f[0]), "F1".to_string()),
        (l_index(names.f[1]), "F2".to_string()),
    ];
    let mut order = Vec::new();
    let mut roles = Vec::new();
    let mut fibers = Vec::new();
    for (f, (comps, kind)) in [(i8a, Kodaira::I(8)), (i8b, Kodaira::I(8)), (istar, Kodaira::IStar(1))]
        .into_iter()
        .enumerate()
    {
        let start = order.len();
        for (pos, c) in comps.into_iter().enumerate() {
            order.push(c);
            roles.push(Role::Fiber { fiber: f, position: pos });
        }
        let g = dual_graph(kind)?;
        fibers.push(FiberData {
            kind,
            components: (start..start + g.multiplicities.len()).collect(),
            multiplicities: g.multiplicities,
        });
    }
    // remaining generators: E1, E2 and the lines through p3, p4, p5
    let used: Vec<usize> = order.iter().map(|o| o.0).collect();
    let mut rest: Vec<(usize, String)> = vec![p(1), p(2)];
    for (i, j) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 1), (3, 2), (4, 1), (4, 2)] {
        rest.push(eij(i, j));
    }
    for k in 3..=5 {
        let lines: Vec<usize> = plane
            .lines_through(fl.p[k - 1])
            .into_iter()
            .filter(|&m| !used.contains(&l_index(m)))
            .collect();
        for (j, m) in lines.into_iter().enumerate() {
            rest.push((l_index(m), format!("L{k}.{}", j + 1)));
        }
    }
    let fiber_class: Vec<usize> = fibers[0].components.iter().map(|&c| order[c].0).collect();
    let mut sid = 0;
    for (g, name) in rest {
        let deg: i64 = fiber_class.iter().map(|&c| ns.gram42[g][c]).sum();
        roles.push(if deg == 1 {
            sid += 1;
            Role::Section { id: sid - 1 }
        } else {
            Role::Other
        });
        order.push((g, name));
    }
    let cfg = from_generators(ns, order, roles, fibers);
    if cfg.len() != nsmodel::GENERATORS {
        return Err(QuotientError::Structure(format!("MII configuration has {} curves", cfg.len())));
    }
    Ok(cfg)
}

/// VII: the (I10, I10, I2, I2) fibration with ten torsion sections.
pub fn vii_config() -> Result<CurveConfigY, QuotientError> {
    torsion_section_model(&[Kodaira::I(10), Kodaira::I(10), Kodaira::I(2), Kodaira::I(2)], &[10])
}

pub fn build_y_config(kind: SurfaceKind, ns: &NSModel) -> Result<CurveConfigY, QuotientError> {
    let cfg = match kind {
        SurfaceKind::MI => {
            let bases = mi_base_configurations(&ns.plane);
            let base = bases.first().ok_or_else(|| QuotientError::Infeasible("no MI base configuration".into()))?;
            mi_config(ns, base)
        }
        SurfaceKind::MII => mii_config(ns, &MIIFlag::default_for(&ns.plane, 0))?,
        SurfaceKind::VII => vii_config()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Alternating integral choices per multiplicative fiber with every section
/// meeting exactly two integral curves; the fixed list for MII.
pub fn identify_integral_sets(config: &CurveConfigY, kind: SurfaceKind) -> Result<Vec<IntegralSet>, QuotientError> {
    if kind == SurfaceKind::MII {
        let find = |l: &str| config.index_of(l).ok_or_else(|| QuotientError::Structure(format!("missing curve {l}")));
        let members = ["L11", "L12", "L21", "L22", "L13", "L14", "L23", "L24", "E3", "E4", "E5"]
            .iter()
            .map(|l| find(l))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(vec![IntegralSet {
            members,
            secondary: vec![find("L")?],
        }]);
    }
    alternating_integral_sets(config)
}

pub fn alternating_integral_sets(config: &CurveConfigY) -> Result<Vec<IntegralSet>, QuotientError> {
    let mut options: Vec<[Vec<usize>; 2]> = Vec::new();
    for fd in &config.fibers {
        match fd.kind {
            Kodaira::I(n) if n % 2 == 0 => {
                let class = |r: usize| fd.components.iter().copied().skip(r).step_by(2).collect::<Vec<_>>();
                options.push([class(0), class(1)]);
            }
            other => return Err(QuotientError::UnsupportedFiber(other)),
        }
    }
    let sections = config.sections();
    let mut out = Vec::new();
    for mask in 0..(1u32 << options.len()) {
        let members: Vec<usize> = options
            .iter()
            .enumerate()
            .flat_map(|(f, o)| o[(mask >> f & 1) as usize].clone())
            .collect();
        let ok = sections
            .iter()
            .all(|&s| members.iter().map(|&c| config.gram[s][c]).sum::<i64>() == 2);
        if ok {
            out.push(IntegralSet {
                members,
                secondary: Vec::new(),
            });
        }
    }
    if out.is_empty() {
        return Err(QuotientError::Infeasible("no admissible integral set".into()));
    }
    Ok(out)
}
