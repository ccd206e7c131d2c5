//! Descent of K3 curve configurations through the inseparable quotient to
//! Enriques-side models, with point identities tracked in an incidence ledger.
//!
//! A curve of weight `w` (1 if integral or an extra class, 2 otherwise)
//! pairs downstairs as `½·w_u·w_v·⟨u,v⟩`. Integral curves land at −1 and are
//! contracted, followed by the scheduled secondary curves; every correction
//! `(u·e)(v·e)` is credited to the canonical point of `e`'s contracted
//! component.

pub mod checks;
pub mod config;
pub mod fibration;
pub mod torsion;

pub use config::{build_y_config, identify_integral_sets, CurveConfigY, FiberData, IntegralSet, Role};
pub use fibration::{bisection_profiles, derive_fibrations, BisectionProfile, HitKind, XFiber, XFibration};
pub use torsion::{torsion_section_model, torsion_solutions, TorsionSolution};

use crate::dynkin::WeightedGraph;
use crate::exactlat::{generated_lattice_i64, GeneratedLattice};
use crate::fibrations::Kodaira;
use crate::nsmodel::{build_ns_model, pair_with, NSClass, NSModel};
use crate::pg4::{hyperovals, Plane};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceKind {
    MI,
    VII,
    MII,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::MI => "MI",
            SurfaceKind::VII => "VII",
            SurfaceKind::MII => "MII",
        })
    }
}

impl FromStr for SurfaceKind {
    type Err = QuotientError;
    fn from_str(s: &str) -> Result<Self, QuotientError> {
        match s.to_ascii_lowercase().as_str() {
            "mi" => Ok(SurfaceKind::MI),
            "vii" => Ok(SurfaceKind::VII),
            "mii" => Ok(SurfaceKind::MII),
            _ => Err(QuotientError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("unknown surface kind `{0}`")]
    UnknownKind(String),
    #[error("fiber type {0} is not supported here")]
    UnsupportedFiber(Kodaira),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("malformed configuration: {0}")]
    Structure(String),
    #[error("scheduled contraction of {label} has self-intersection {value}, not −1")]
    NotExceptional { label: String, value: i64 },
    #[error("extra class {extra} meets contracted curve {curve}")]
    NonOrthogonalExtra { extra: String, curve: String },
    #[error("odd pairing between extra classes {0} and {1}")]
    OddExtraPairing(String, String),
    #[error("not an elliptic fibration: {0}")]
    NotFibration(String),
    #[error(transparent)]
    Lattice(#[from] crate::exactlat::LatticeError),
    #[error(transparent)]
    Dynkin(#[from] crate::dynkin::DynkinError),
}

/// Non-effective classes carried through the descent with weight 1.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ExtraClasses {
    pub labels: Vec<String>,
    /// `with_curves[k][i]` = K3 pairing of extra `k` with curve `i`.
    pub with_curves: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
}

impl ExtraClasses {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Extras given as classes in the 42-generator model.
    pub fn from_ns(ns: &NSModel, config: &CurveConfigY, classes: &[&NSClass], prefix: &str) -> Result<Self, QuotientError> {
        let idx = config
            .ns_index
            .as_ref()
            .ok_or_else(|| QuotientError::Precondition("configuration has no generator coordinates".into()))?;
        let with_curves = classes.iter().map(|c| idx.iter().map(|&i| ns.pair_generator(&c.coords, i)).collect()).collect();
        let gram = classes
            .iter()
            .map(|a| classes.iter().map(|b| pair_with(&ns.gram42, &a.coords, &b.coords)).collect())
            .collect();
        Ok(ExtraClasses {
            labels: (1..=classes.len()).map(|k| format!("{prefix}{k}")).collect(),
            with_curves,
            gram,
        })
    }

    /// Transport extras along a curve bijection `perm: this config → other`.
    pub fn transported(&self, perm: &[usize]) -> ExtraClasses {
        let mut with_curves = vec![vec![0; perm.len()]; self.len()];
        for (k, row) in self.with_curves.iter().enumerate() {
            for (i, &p) in perm.iter().enumerate() {
                with_curves[k][i] = row[p];
            }
        }
        ExtraClasses {
            labels: self.labels.clone(),
            with_curves,
            gram: self.gram.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XClass {
    pub label: String,
    pub effective: bool,
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointType {
    Canonical(String),
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XPoint {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: PointType,
    pub members: Vec<String>,
}

impl XPoint {
    pub fn is_canonical(&self) -> bool {
        matches!(self.kind, PointType::Canonical(_))
    }
}

/// One local intersection: a point (or none, for pairings with extra
/// classes) and its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contribution {
    pub point: Option<usize>,
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub pair: (usize, usize),
    pub contributions: Vec<Contribution>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularImage {
    pub label: String,
    pub self_intersection: i64,
    pub incidence: Vec<(usize, i64)>,
}

/// Enriques-side model: descended classes, Gram, points and ledger.
#[derive(Clone, Debug, Serialize)]
pub struct XModel {
    pub classes: Vec<XClass>,
    pub gram: Vec<Vec<i64>>,
    pub points: Vec<XPoint>,
    pub ledger: Vec<LedgerEntry>,
    /// Per class, the contraction credits to its self-intersection by point.
    pub incidence: Vec<Vec<(usize, i64)>>,
    pub contracted: Vec<String>,
    pub singular_images: Vec<SingularImage>,
}

impl XModel {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn curves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.classes[i].effective).collect()
    }

    pub fn extras(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.classes[i].effective).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.label == label)
    }

    pub fn canonical_points(&self) -> Vec<usize> {
        self.points.iter().filter(|p| p.is_canonical()).map(|p| p.id).collect()
    }

    pub fn point_type(&self, p: usize) -> &PointType {
        &self.points[p].kind
    }

    /// Canonical points a class passes through.
    pub fn points_on(&self, class: usize) -> Vec<usize> {
        self.incidence[class].iter().filter(|x| x.1 > 0).map(|x| x.0).collect()
    }

    pub fn contributions(&self, a: usize, b: usize) -> &[Contribution] {
        let key = (a.min(b), a.max(b));
        match self.ledger.binary_search_by(|e| e.pair.cmp(&key)) {
            Ok(k) => &self.ledger[k].contributions,
            Err(_) => &[],
        }
    }

    pub fn graph(&self) -> WeightedGraph {
        WeightedGraph::from_gram(
            self.classes.iter().map(|c| c.label.clone()).collect(),
            self.classes.iter().map(|c| c.effective).collect(),
            &self.gram,
        )
        .expect("descended Gram is a valid weighted graph")
    }

    pub fn lattice(&self) -> Result<GeneratedLattice, QuotientError> {
        Ok(generated_lattice_i64(&self.gram)?)
    }

    /// Violations of the model invariants; empty when all hold.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.len();
        for i in 0..n {
            if self.gram[i][i] != -2 {
                out.push(format!("{} has norm {}", self.classes[i].label, self.gram[i][i]));
            }
            for j in 0..n {
                if self.gram[i][j] != self.gram[j][i] {
                    out.push(format!("asymmetric at {i},{j}"));
                }
                if i < j {
                    if self.classes[i].effective && self.classes[j].effective && self.gram[i][j] < 0 {
                        out.push(format!("negative pairing {} · {}", self.classes[i].label, self.classes[j].label));
                    }
                    let s: i64 = self.contributions(i, j).iter().map(|c| c.multiplicity).sum();
                    if s != self.gram[i][j] {
                        out.push(format!(
                            "ledger of ({}, {}) sums to {s}, Gram says {}",
                            self.classes[i].label, self.classes[j].label, self.gram[i][j]
                        ));
                    }
                }
            }
            if self.classes[i].effective {
                let credit: i64 = self.incidence[i].iter().map(|x| x.1).sum();
                if credit != 2 {
                    out.push(format!("{} collects contraction credit {credit}", self.classes[i].label));
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph X {\n");
        for (i, c) in self.classes.iter().enumerate() {
            let style = if c.effective { "solid" } else { "dashed" };
            s += &format!("  c{i} [label=\"{}\", style={style}];\n", c.label);
        }
        for p in self.points.iter().filter(|p| p.is_canonical()) {
            if let PointType::Canonical(t) = &p.kind {
                s += &format!("  p{} [label=\"{t}\", shape=point];\n", p.id);
            }
        }
        for e in &self.ledger {
            let (a, b) = e.pair;
            for c in &e.contributions {
                let style = if c.multiplicity >= 2 { "bold" } else { "solid" };
                let at = c.point.map_or(String::new(), |p| format!(", tooltip=\"p{p}\""));
                s += &format!("  c{a} -- c{b} [label=\"{}\", style={style}{at}];\n", c.multiplicity);
            }
        }
        for (i, inc) in self.incidence.iter().enumerate() {
            for &(p, m) in inc {
                if m > 0 {
                    s += &format!("  c{i} -- p{p} [style=dotted];\n");
                }
            }
        }
        s + "}\n"
    }
}

fn rdp_name(gram: &[Vec<i64>], comp: &[usize]) -> String {
    let n = comp.len();
    if n == 1 {
        return "A1".into();
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|a| (0..n).filter(|&b| b != a && gram[comp[a]][comp[b]] != 0).collect()).collect();
    let branch: Vec<usize> = (0..n).filter(|&a| adj[a].len() >= 3).collect();
    match branch.as_slice() {
        [] => format!("A{n}"),
        [c] if adj[*c].len() == 3 => {
            let mut arms: Vec<usize> = adj[*c]
                .iter()
                .map(|&s| {
                    let (mut prev, mut cur, mut len) = (*c, s, 1);
                    while let Some(&nx) = adj[cur].iter().find(|&&x| x != prev) {
                        prev = cur;
                        cur = nx;
                        len += 1;
                    }
                    len
                })
                .collect();
            arms.sort();
            match arms.as_slice() {
                [1, 1, _] => format!("D{n}"),
                [1, 2, 2] => "E6".into(),
                [1, 2, 3] => "E7".into(),
                [1, 2, 4] => "E8".into(),
                _ => format!("R{n}"),
            }
        }
        _ => format!("R{n}"),
    }
}

struct Ledger {
    map: BTreeMap<(usize, usize), BTreeMap<Option<usize>, i64>>,
}

impl Ledger {
    fn add(&mut self, a: usize, b: usize, point: Option<usize>, m: i64) {
        *self.map.entry((a.min(b), a.max(b))).or_default().entry(point).or_insert(0) += m;
    }
}

/// Descend a configuration with the given integral set and extra classes.
pub fn descend(config: &CurveConfigY, integral: &IntegralSet, extras: &ExtraClasses) -> Result<XModel, QuotientError> {
    let nc = config.len();
    let n = nc + extras.len();
    let label = |i: usize| if i < nc { config.labels[i].clone() } else { extras.labels[i - nc].clone() };
    let y = |i: usize, j: usize| -> i64 {
        match (i < nc, j < nc) {
            (true, true) => config.gram[i][j],
            (true, false) => extras.with_curves[j - nc][i],
            (false, true) => extras.with_curves[i - nc][j],
            (false, false) => extras.gram[i - nc][j - nc],
        }
    };
    let contracted: Vec<usize> = integral.contracted().collect();
    for k in 0..extras.len() {
        if let Some(&c) = contracted.iter().find(|&&c| extras.with_curves[k][c] != 0) {
            return Err(QuotientError::NonOrthogonalExtra {
                extra: extras.labels[k].clone(),
                curve: config.labels[c].clone(),
            });
        }
    }
    let weight: Vec<i64> = (0..n).map(|i| if i >= nc || integral.contains(i) { 1 } else { 2 }).collect();
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = weight[i] * weight[j] * y(i, j);
            if v % 2 != 0 {
                return Err(QuotientError::OddExtraPairing(label(i), label(j)));
            }
            g[i][j] = v / 2;
        }
    }

    // canonical points: connected components of the contracted set
    let mut comp_of = vec![usize::MAX; n];
    let mut points: Vec<XPoint> = Vec::new();
    for &c in &contracted {
        if comp_of[c] != usize::MAX {
            continue;
        }
        let id = points.len();
        let mut stack = vec![c];
        let mut members = Vec::new();
        comp_of[c] = id;
        while let Some(x) = stack.pop() {
            members.push(x);
            for &z in &contracted {
                if comp_of[z] == usize::MAX && config.gram[x][z] != 0 {
                    comp_of[z] = id;
                    stack.push(z);
                }
            }
        }
        members.sort();
        points.push(XPoint {
            id,
            kind: PointType::Canonical(rdp_name(&config.gram, &members)),
            members: members.iter().map(|&m| config.labels[m].clone()).collect(),
        });
    }

    let mut ledger = Ledger { map: BTreeMap::new() };
    for i in 0..n {
        for j in i + 1..n {
            let k = y(i, j);
            if k == 0 {
                continue;
            }
            if i >= nc || j >= nc {
                ledger.add(i, j, None, g[i][j]);
            } else if weight[i] == 2 && weight[j] == 2 {
                for _ in 0..k {
                    let id = points.len();
                    points.push(XPoint {
                        id,
                        kind: PointType::Generic,
                        members: vec![label(i), label(j)],
                    });
                    ledger.add(i, j, Some(id), 2);
                }
            } else {
                let e = if weight[i] == 1 { i } else { j };
                ledger.add(i, j, Some(comp_of[e]), g[i][j]);
            }
        }
    }

    let mut alive = vec![true; n];
    let mut self_credit: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
    for &e in &contracted {
        if g[e][e] != -1 {
            return Err(QuotientError::NotExceptional {
                label: label(e),
                value: g[e][e],
            });
        }
        alive[e] = false;
        let pt = comp_of[e];
        let live: Vec<usize> = (0..n).filter(|&u| alive[u] && g[u][e] != 0).collect();
        for (a, &u) in live.iter().enumerate() {
            for &v in &live[a..] {
                let c = g[u][e] * g[v][e];
                g[u][v] += c;
                if u == v {
                    *self_credit[u].entry(pt).or_insert(0) += c;
                } else {
                    g[v][u] += c;
                    ledger.add(u, v, Some(pt), c);
                }
            }
        }
    }

    let survivors: Vec<usize> = (0..nc).filter(|&i| alive[i]).collect();
    let nodal: Vec<usize> = survivors.iter().copied().filter(|&i| g[i][i] == -2).collect();
    let keep: Vec<usize> = nodal.iter().copied().chain(nc..n).collect();
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in keep.iter().enumerate() {
        pos[i] = k;
    }
    let classes = keep
        .iter()
        .map(|&i| XClass {
            label: label(i),
            effective: i < nc,
            weight: weight[i] as u8,
        })
        .collect();
    let gram = keep.iter().map(|&i| keep.iter().map(|&j| g[i][j]).collect()).collect();
    let mut entries = Vec::new();
    for (&(a, b), contribs) in &ledger.map {
        if pos[a] == usize::MAX || pos[b] == usize::MAX {
            continue;
        }
        let (pa, pb) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
        let contributions = contribs
            .iter()
            .filter(|(_, &m)| m != 0)
            .map(|(&p, &m)| Contribution { point: p, multiplicity: m })
            .collect::<Vec<_>>();
        if !contributions.is_empty() {
            entries.push(LedgerEntry {
                pair: (pa, pb),
                contributions,
            });
        }
    }
    entries.sort_by_key(|e| e.pair);
    let incidence = keep.iter().map(|&i| self_credit[i].iter().map(|(&p, &m)| (p, m)).collect()).collect();
    let singular_images = survivors
        .iter()
        .filter(|&&i| g[i][i] != -2)
        .map(|&i| SingularImage {
            label: label(i),
            self_intersection: g[i][i],
            incidence: self_credit[i].iter().map(|(&p, &m)| (p, m)).collect(),
        })
        .collect();
    Ok(XModel {
        classes,
        gram,
        points,
        ledger: entries,
        incidence,
        contracted: contracted.iter().map(|&c| label(c)).collect(),
        singular_images,
    })
}

/// Everything used to build a surface model, kept for cross-checks.
#[derive(Clone, Debug)]
pub struct SurfaceBuild {
    pub kind: SurfaceKind,
    pub config: CurveConfigY,
    pub integral_sets: Vec<IntegralSet>,
    pub extras: ExtraClasses,
    pub extra_classes: Vec<NSClass>,
    pub model: XModel,
}

/// Extra classes for a configuration and integral set: the hyperoval
/// classes orthogonal to every contracted curve.
pub fn extra_classes_for(ns: &NSModel, config: &CurveConfigY, integral: &IntegralSet) -> Result<Vec<NSClass>, QuotientError> {
    let idx = config
        .ns_index
        .as_ref()
        .ok_or_else(|| QuotientError::Precondition("configuration has no generator coordinates".into()))?;
    let all: Vec<NSClass> = hyperovals(&ns.plane).iter().map(|h| ns.hyperoval_class(h)).collect();
    let curves: Vec<usize> = integral.contracted().map(|c| idx[c]).collect();
    Ok(ns.orthogonal_filter(&all, &curves).into_iter().cloned().collect())
}

pub fn build_surface_with(kind: SurfaceKind, ns: &NSModel) -> Result<SurfaceBuild, QuotientError> {
    let config = build_y_config(kind, ns)?;
    let integral_sets = identify_integral_sets(&config, kind)?;
    let chosen = &integral_sets[0];
    let (extras, extra_classes) = if config.ns_index.is_some() {
        let cls = extra_classes_for(ns, &config, chosen)?;
        let refs: Vec<&NSClass> = cls.iter().collect();
        (ExtraClasses::from_ns(ns, &config, &refs, "r")?, cls)
    } else {
        (ExtraClasses::default(), Vec::new())
    };
    let model = descend(&config, chosen, &extras)?;
    Ok(SurfaceBuild {
        kind,
        config,
        integral_sets,
        extras,
        extra_classes,
        model,
    })
}

pub fn build_surface(kind: SurfaceKind, plane: &Plane) -> Result<XModel, QuotientError> {
    let ns = build_ns_model(plane);
    Ok(build_surface_with(kind, &ns)?.model)
}
