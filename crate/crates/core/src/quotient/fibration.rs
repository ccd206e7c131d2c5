//! Elliptic fibrations read off a descended model: half-fiber classes from
//! maximal parabolic decompositions, Kodaira types from the ledger, and
//! bisection profiles.

use super::{QuotientError, XModel};
use crate::dynkin::{enumerate_parabolics, maximal_decompositions, parabolic_type, Family};
use crate::exactlat::matrix::{row_hermite, to_big};
use crate::exactlat::GeneratedLattice;
use crate::fibrations::{descend_fiber_type, y_catalog, Kodaira, KodairaFiber};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Debug, Serialize)]
pub struct XFiber {
    pub kind: KodairaFiber,
    /// Class indices; empty for an irreducible fiber inferred from a node.
    pub components: Vec<usize>,
    pub coefficients: Vec<i64>,
    /// Canonical point that is the node of an inferred `I1`.
    pub node: Option<usize>,
    /// Canonical points on the fiber with the number of components through each.
    pub canonical_points: Vec<(usize, usize)>,
    /// The whole fiber is `λ·f` for the half-fiber class `f`. When a
    /// non-effective class stands in for a hidden curve the listed divisor
    /// is only `f`.
    pub lambda: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct XFibration {
    /// Primitive isotropic class in the induced basis.
    #[serde(with = "crate::json::big_vec")]
    pub half_fiber: Vec<BigInt>,
    /// The half-fiber is `half_fiber / 2`, which lies only in the unimodular closure.
    pub glued: bool,
    pub fibers: Vec<XFiber>,
    /// Effective classes meeting the fiber class with degree 2.
    pub bisections: Vec<usize>,
    /// Whether the fiber types are the image of exactly one K3 catalog entry.
    pub catalog_match: bool,
    /// Index of a maximal decomposition realizing the fibration.
    pub decomposition: usize,
}

impl XFibration {
    pub fn types(&self) -> Vec<KodairaFiber> {
        let mut t: Vec<KodairaFiber> = self.fibers.iter().map(|f| f.kind).collect();
        t.sort();
        t
    }

    pub fn type_string(&self) -> String {
        crate::fibrations::fiber_list(&self.types())
    }
}

/// Primitive integral kernel vector of a corank-one Gram block, with
/// positive entries.
fn null_coefficients(gram: &[Vec<i64>], set: &[usize]) -> Vec<i64> {
    let sub: Vec<Vec<i64>> = set.iter().map(|&i| set.iter().map(|&j| gram[i][j]).collect()).collect();
    let (h, v, _) = row_hermite(&to_big(&sub));
    let k = h.iter().position(|r| r.iter().all(|x| x.is_zero())).expect("parabolic block is singular");
    let mut c: Vec<BigInt> = v[k].clone();
    if c.iter().any(|x| x.is_negative()) {
        c = c.into_iter().map(|x| -x).collect();
    }
    let g = c.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    c.iter().map(|x| (x / &g).to_i64().expect("small coefficients")).collect()
}

fn pair_comb(model: &XModel, comb: &[(usize, i64)], c: usize) -> i64 {
    comb.iter().map(|&(i, k)| k * model.gram[i][c]).sum()
}

fn project(lat: &GeneratedLattice, n: usize, comb: &[(usize, i64)]) -> Vec<BigInt> {
    let mut x = vec![0i64; n];
    for &(i, k) in comb {
        x[i] += k;
    }
    lat.project_i64(&x)
}

fn primitive(v: &[BigInt]) -> (Vec<BigInt>, BigInt) {
    let g = v.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    (v.iter().map(|x| x / &g).collect(), g)
}

/// Kodaira type of an effective parabolic component, using the ledger for
/// the two ambiguous shapes.
fn kodaira_of(model: &XModel, family: Family, parameter: usize, comps: &[usize]) -> Kodaira {
    let single_point = |a: usize, b: usize| -> Option<Option<usize>> {
        match model.contributions(a, b) {
            [c] => Some(c.point),
            _ => None,
        }
    };
    let hidden = comps.iter().any(|&c| !model.classes[c].effective);
    match (family, parameter) {
        (Family::A, 1) if hidden => {
            let d4 = comps
                .iter()
                .filter(|&&c| model.classes[c].effective)
                .flat_map(|&c| model.points_on(c))
                .any(|p| matches!(&model.points[p].kind, super::PointType::Canonical(t) if t.starts_with('D')));
            if d4 {
                Kodaira::III
            } else {
                Kodaira::I(2)
            }
        }
        (Family::A, 1) => {
            if matches!(single_point(comps[0], comps[1]), Some(Some(_))) {
                Kodaira::III
            } else {
                Kodaira::I(2)
            }
        }
        (Family::A, 2) => {
            let pts = [
                single_point(comps[0], comps[1]),
                single_point(comps[0], comps[2]),
                single_point(comps[1], comps[2]),
            ];
            match pts {
                [Some(a), Some(b), Some(c)] if a.is_some() && a == b && b == c => Kodaira::IV,
                _ => Kodaira::I(3),
            }
        }
        (Family::A, n) => Kodaira::I(n as u32 + 1),
        (Family::D, n) => Kodaira::IStar(n as u32 - 4),
        (Family::E, 6) => Kodaira::IVStar,
        (Family::E, 7) => Kodaira::IIIStar,
        (Family::E, _) => Kodaira::IIStar,
    }
}

fn catalog_images() -> Vec<Vec<Kodaira>> {
    y_catalog()
        .into_iter()
        .map(|g| {
            let mut f: Vec<Kodaira> = g.iter().map(|&k| descend_fiber_type(k).expect("catalog").0).collect();
            f.sort();
            f
        })
        .collect()
}

/// Glue vectors `z` (0/1 coordinates) with `z/2` extending the lattice to
/// an even overlattice of index 2.
pub fn even_glue_vectors(gram: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    let n = gram.len();
    let g: Vec<Vec<i64>> = gram.iter().map(|r| r.iter().map(|x| x.to_i64().expect("small gram")).collect()).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let z: Vec<i64> = (0..n).map(|i| i64::from(mask >> i & 1)).collect();
        let gz: Vec<i64> = (0..n).map(|i| (0..n).map(|j| g[i][j] * z[j]).sum()).collect();
        if gz.iter().any(|x| x.rem_euclid(2) != 0) {
            continue;
        }
        let zz: i64 = z.iter().zip(&gz).map(|(a, b)| a * b).sum();
        if zz.rem_euclid(8) == 0 {
            out.push(z);
        }
    }
    out
}

/// The classes' span and, when it has index 2 in an even unimodular
/// lattice, the unique glue vector.
pub fn unimodular_closure(model: &XModel) -> Result<(GeneratedLattice, Option<Vec<i64>>), QuotientError> {
    let lat = model.lattice()?;
    let det = lat.lattice.det().abs();
    if lat.rank != 10 {
        return Err(QuotientError::Precondition(format!("classes span rank {}", lat.rank)));
    }
    if det == BigInt::from(1) {
        return Ok((lat, None));
    }
    if det != BigInt::from(4) {
        return Err(QuotientError::Precondition(format!("classes span a lattice of determinant {det}")));
    }
    let glue = even_glue_vectors(lat.lattice.gram());
    match glue.as_slice() {
        [z] => {
            let z = z.clone();
            Ok((lat, Some(z)))
        }
        _ => Err(QuotientError::Precondition(format!("{} candidate even unimodular overlattices", glue.len()))),
    }
}

/// All elliptic fibrations visible as maximal parabolic decompositions,
/// one per half-fiber class.
pub fn derive_fibrations(model: &XModel) -> Result<Vec<XFibration>, QuotientError> {
    let (lat, glue) = unimodular_closure(model)?;
    let n = model.len();
    let graph = model.graph();
    let ps = enumerate_parabolics(&graph)?;
    let decs = maximal_decompositions(&graph, &ps);
    let catalog = catalog_images();
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut out = Vec::new();
    for (di, dec) in decs.iter().enumerate() {
        let comp = &dec.components[0];
        let coeff = null_coefficients(&model.gram, &comp.vertices);
        let mut comb: Vec<(usize, i64)> = comp.vertices.iter().copied().zip(coeff).collect();
        let orient = (0..n).filter(|&c| model.classes[c].effective).map(|c| pair_comb(model, &comb, c)).find(|&x| x != 0);
        if orient.is_some_and(|x| x < 0) {
            comb.iter_mut().for_each(|x| x.1 = -x.1);
        }
        let (f, scale) = primitive(&project(&lat, n, &comb));
        let mut scale = scale.to_i64().expect("small scale");
        let two = BigInt::from(2);
        let glued = glue.as_ref().is_some_and(|z| f.iter().zip(z).all(|(x, &b)| (x - b).mod_floor(&two).is_zero()));
        if glued {
            scale *= 2;
        }
        if !seen.insert(f.clone()) {
            continue;
        }
        let pf = |c: usize| -> i64 { pair_comb(model, &comb, c) / scale };
        let effective: Vec<usize> = (0..n).filter(|&c| model.classes[c].effective).collect();
        if let Some(&c) = effective.iter().find(|&&c| pf(c) < 0) {
            return Err(QuotientError::NotFibration(format!("{} meets the fiber negatively", model.classes[c].label)));
        }
        let orth: Vec<usize> = (0..n).filter(|&c| pf(c) == 0).collect();
        let mut fibers = Vec::new();
        let mut used = vec![false; n];
        for &start in &orth {
            if used[start] {
                continue;
            }
            let mut members = vec![start];
            used[start] = true;
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                for &z in &orth {
                    if !used[z] && model.gram[x][z] > 0 {
                        used[z] = true;
                        members.push(z);
                    }
                }
                k += 1;
            }
            members.sort();
            if members.iter().all(|&c| !model.classes[c].effective) {
                continue;
            }
            let ty = parabolic_type(&graph, &members)?.ok_or_else(|| {
                QuotientError::NotFibration(format!("fiber components {members:?} are not parabolic"))
            })?;
            let coefficients = null_coefficients(&model.gram, &members);
            let dcomb: Vec<(usize, i64)> = members.iter().copied().zip(coefficients.iter().copied()).collect();
            let d = project(&lat, n, &dcomb);
            let lambda = d
                .iter()
                .zip(&f)
                .find(|(_, y)| !y.is_zero())
                .map(|(x, y)| x / y)
                .and_then(|l| l.to_i64())
                .unwrap_or(0);
            if lambda <= 0 || d.iter().zip(&f).any(|(x, y)| *x != y * lambda) {
                return Err(QuotientError::NotFibration(format!("fiber {members:?} is not a multiple of the half-fiber")));
            }
            let lambda = if glued { lambda * 2 } else { lambda };
            // a non-effective member is never the hidden component itself, so such a fiber is twice the half-fiber
            let hidden = members.iter().any(|&c| !model.classes[c].effective);
            let lambda = if hidden { 2 } else { lambda };
            let mut canonical_points = canonical_on(model, &members);
            if hidden {
                canonical_points.iter_mut().for_each(|p| p.1 = 2);
            }
            let kind = kodaira_of(model, ty.family, ty.parameter, &members);
            fibers.push(XFiber {
                kind: KodairaFiber::new(kind),
                canonical_points,
                components: members,
                coefficients,
                node: None,
                lambda,
            });
        }
        let on_visible: BTreeSet<usize> = fibers.iter().flat_map(|f| f.canonical_points.iter().map(|p| p.0)).collect();
        for p in model.canonical_points() {
            if !on_visible.contains(&p) {
                fibers.push(XFiber {
                    kind: KodairaFiber::new(Kodaira::I(1)),
                    components: Vec::new(),
                    coefficients: Vec::new(),
                    node: Some(p),
                    canonical_points: vec![(p, 1)],
                    lambda: 2,
                });
            }
        }
        let bisections: Vec<usize> = effective.iter().copied().filter(|&c| pf(c) == 1).collect();
        if bisections.is_empty() {
            return Err(QuotientError::NotFibration("no bisection among the curves".into()));
        }
        for fib in fibers
            .iter_mut()
            .filter(|f| f.node.is_none() && f.components.iter().all(|&c| model.classes[c].effective))
        {
            let meets_once = bisections.iter().any(|&s| {
                fib.components.iter().zip(&fib.coefficients).map(|(&c, &k)| k * model.gram[s][c]).sum::<i64>() == 1
            });
            if meets_once != (fib.lambda == 1) {
                return Err(QuotientError::NotFibration("bisection parity disagrees with the half-fiber index".into()));
            }
            fib.kind.multiple = meets_once;
        }
        let mut plain: Vec<Kodaira> = fibers.iter().map(|f| f.kind.kind).collect();
        plain.sort();
        let catalog_match = catalog.iter().filter(|c| **c == plain).count() == 1;
        out.push(XFibration {
            half_fiber: f,
            glued,
            fibers,
            bisections,
            catalog_match,
            decomposition: di,
        });
    }
    Ok(out)
}

fn canonical_on(model: &XModel, comps: &[usize]) -> Vec<(usize, usize)> {
    model
        .canonical_points()
        .into_iter()
        .filter_map(|p| {
            let k = comps.iter().filter(|&&c| model.points_on(c).contains(&p)).count();
            (k > 0).then_some((p, k))
        })
        .collect()
}

/// How a bisection meets a fiber at one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum HitKind {
    /// Through a point lying on two or more components (or the node of an `I1`).
    SingularPoint(usize),
    /// Through a canonical point lying on a single component.
    SimpleCanonical(usize),
    /// One point of multiplicity 2 on a single component.
    Tangent(Option<usize>),
    /// A transversal meeting at a point that is not canonical.
    Transversal,
}

impl HitKind {
    pub fn tag(&self) -> &'static str {
        match self {
            HitKind::SingularPoint(_) => "singular",
            HitKind::SimpleCanonical(_) => "canonical",
            HitKind::Tangent(_) => "tangent",
            HitKind::Transversal => "transversal",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BisectionProfile {
    pub bisection: usize,
    /// Per fiber (in fibration order), the meetings.
    pub hits: Vec<Vec<HitKind>>,
}

impl BisectionProfile {
    /// Sorted `(fiber type, tags)` pairs, for comparing profiles.
    pub fn summary(&self, fib: &XFibration) -> Vec<(String, Vec<&'static str>)> {
        let mut v: Vec<(String, Vec<&'static str>)> = fib
            .fibers
            .iter()
            .zip(&self.hits)
            .map(|(f, h)| {
                let mut t: Vec<&'static str> = h.iter().map(|k| k.tag()).collect();
                t.sort();
                (f.kind.to_string(), t)
            })
            .collect();
        v.sort();
        v
    }
}

pub fn bisection_profiles(model: &XModel, fib: &XFibration) -> Result<Vec<BisectionProfile>, QuotientError> {
    let mut out = Vec::new();
    for &s in &fib.bisections {
        if fib.fibers.iter().any(|f| f.components.contains(&s)) {
            return Err(QuotientError::NotFibration(format!("{} is both a bisection and a fiber component", model.classes[s].label)));
        }
        let on_s = model.points_on(s);
        let mut hits = Vec::new();
        for f in &fib.fibers {
            if let Some(q) = f.node {
                hits.push(vec![if on_s.contains(&q) { HitKind::SingularPoint(q) } else { HitKind::Tangent(None) }]);
                continue;
            }
            let mut here = Vec::new();
            let mut at_points: std::collections::BTreeMap<usize, i64> = Default::default();
            let hidden = f.components.iter().any(|&c| !model.classes[c].effective);
            for &c in f.components.iter().filter(|&&c| model.classes[c].effective) {
                for contr in model.contributions(s, c) {
                    match contr.point {
                        Some(p) if model.points[p].is_canonical() => *at_points.entry(p).or_insert(0) += contr.multiplicity,
                        Some(_) => here.push(if contr.multiplicity >= 2 { HitKind::Tangent(None) } else { HitKind::Transversal }),
                        None => {
                            return Err(QuotientError::NotFibration("formal pairing between effective curves".into()));
                        }
                    }
                }
            }
            for (p, m) in at_points {
                let through = f.canonical_points.iter().find(|x| x.0 == p).map_or(0, |x| x.1);
                here.push(if through >= 2 {
                    HitKind::SingularPoint(p)
                } else if m == 1 {
                    HitKind::SimpleCanonical(p)
                } else {
                    HitKind::Tangent(Some(p))
                });
            }
            if hidden {
                let seen: i64 = here
                    .iter()
                    .map(|h| match h {
                        HitKind::SingularPoint(_) | HitKind::Tangent(_) => 2,
                        _ => 1,
                    })
                    .sum();
                match 2 - seen {
                    2 => here.push(HitKind::Tangent(None)),
                    1 => here.push(HitKind::Transversal),
                    _ => {}
                }
            }
            here.sort();
            hits.push(here);
        }
        out.push(BisectionProfile { bisection: s, hits });
    }
    Ok(out)
}
