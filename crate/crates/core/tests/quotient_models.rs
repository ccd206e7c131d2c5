use enriques_core::exactlat::signature;
use enriques_core::fibrations::{fiber_list, Kodaira, KodairaFiber};
use enriques_core::nsmodel::{build_ns_model, NSModel};
use enriques_core::pg4::{build_plane, mii_special_hyperovals, MIIFlag};
use enriques_core::quotient::checks::{mi_choice_independence, mi_torsion_cross_validation, torsion_uniqueness};
use enriques_core::quotient::config::mii_f_candidates;
use enriques_core::quotient::{
    bisection_profiles, build_surface_with, derive_fibrations, torsion_section_model, PointType, SurfaceBuild,
    SurfaceKind, XFibration, XModel,
};
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::sync::OnceLock;

use Kodaira::{I, IStar};

fn ns() -> &'static NSModel {
    static NS: OnceLock<NSModel> = OnceLock::new();
    NS.get_or_init(|| build_ns_model(&build_plane()))
}

fn build(kind: SurfaceKind) -> &'static SurfaceBuild {
    static B: OnceLock<Vec<SurfaceBuild>> = OnceLock::new();
    let all = B.get_or_init(|| {
        [SurfaceKind::MI, SurfaceKind::VII, SurfaceKind::MII]
            .into_iter()
            .map(|k| build_surface_with(k, ns()).unwrap())
            .collect()
    });
    all.iter().find(|b| b.kind == kind).unwrap()
}

fn model(kind: SurfaceKind) -> &'static XModel {
    &build(kind).model
}

fn fibrations(kind: SurfaceKind) -> Vec<XFibration> {
    derive_fibrations(model(kind)).unwrap()
}

#[test]
fn class_counts() {
    for (kind, curves, extras, canonical) in [(SurfaceKind::MI, 30, 10, 12), (SurfaceKind::VII, 20, 0, 12), (SurfaceKind::MII, 28, 12, 9)] {
        let m = model(kind);
        assert_eq!(m.curves().len(), curves, "{kind}");
        assert_eq!(m.extras().len(), extras, "{kind}");
        assert_eq!(m.canonical_points().len(), canonical, "{kind}");
    }
    let types: Vec<String> = model(SurfaceKind::MII)
        .canonical_points()
        .into_iter()
        .filter_map(|p| match model(SurfaceKind::MII).point_type(p) {
            PointType::Canonical(t) => Some(t.clone()),
            PointType::Generic => None,
        })
        .collect();
    assert_eq!(types.iter().filter(|t| t.as_str() == "D4").count(), 1);
    assert_eq!(types.iter().filter(|t| t.as_str() == "A1").count(), 8);
}

#[test]
fn descended_gram_and_ledger() {
    for kind in [SurfaceKind::MI, SurfaceKind::VII, SurfaceKind::MII] {
        let m = model(kind);
        let n = m.len();
        for i in 0..n {
            assert_eq!(m.gram[i][i], -2);
            for j in 0..n {
                assert_eq!(m.gram[i][j], m.gram[j][i]);
                if i != j && m.classes[i].effective && m.classes[j].effective {
                    assert!(m.gram[i][j] >= 0);
                }
                if i < j {
                    let sum: i64 = m.contributions(i, j).iter().map(|c| c.multiplicity).sum();
                    assert_eq!(sum, m.gram[i][j], "{kind} {} {}", m.classes[i].label, m.classes[j].label);
                }
            }
        }
        for c in m.curves() {
            assert_eq!(m.incidence[c].iter().map(|x| x.1).sum::<i64>(), 2, "{kind} {}", m.classes[c].label);
        }
        assert!(m.invariant_violations().is_empty());
    }
}

#[test]
fn models_span_num() {
    for kind in [SurfaceKind::MI, SurfaceKind::VII, SurfaceKind::MII] {
        let gl = model(kind).lattice().unwrap();
        assert_eq!(gl.rank, 10, "{kind}");
        let sig = signature(gl.lattice.gram());
        assert_eq!((sig.positive, sig.negative), (1, 9), "{kind}");
    }
    // MI and VII classes sit in index 2, the MII classes span everything
    assert_eq!(model(SurfaceKind::MI).lattice().unwrap().lattice.det(), BigInt::from(-4));
    assert_eq!(model(SurfaceKind::VII).lattice().unwrap().lattice.det(), BigInt::from(-4));
    assert_eq!(model(SurfaceKind::MII).lattice().unwrap().lattice.det(), BigInt::from(-1));
}

fn normalize(s: &str) -> String {
    let mut v: Vec<KodairaFiber> = s.split(',').map(|t| t.parse().unwrap()).collect();
    v.sort();
    fiber_list(&v)
}

#[test]
fn fibration_types() {
    let table: [(SurfaceKind, &[&str]); 3] = [
        (SurfaceKind::MI, &["I5,I5,I1,I1", "I6,2IV,I2", "I4,I4,2III", "I3,I3,I3,I3"]),
        (SurfaceKind::VII, &["I5,I5,I1,I1", "I6,2IV,I2", "I9,I1,I1,I1", "I8,2III"]),
        (SurfaceKind::MII, &["I4,I4,III", "I6,IV,I2", "I8,III", "I6,2III", "2IV,2IV,IV"]),
    ];
    for (kind, want) in table {
        let fibs = fibrations(kind);
        let got: BTreeSet<String> = fibs.iter().map(|f| f.type_string()).collect();
        let want: BTreeSet<String> = want.iter().map(|s| normalize(s)).collect();
        assert_eq!(got, want, "{kind}");
        assert!(fibs.iter().all(|f| f.catalog_match));
        for f in &fibs {
            let euler: u32 = f.fibers.iter().map(|x| x.kind.kind.euler()).sum();
            assert!(euler <= 12, "{kind} {}", f.type_string());
            assert!(f.fibers.iter().filter(|x| x.kind.multiple).count() <= 2);
        }
    }
}

#[test]
fn fiber_classes_are_numerically_equal() {
    for kind in [SurfaceKind::MI, SurfaceKind::VII, SurfaceKind::MII] {
        let m = model(kind);
        for fib in fibrations(kind) {
            let degrees: BTreeSet<Vec<i64>> = fib
                .fibers
                .iter()
                .filter(|f| !f.components.is_empty())
                .map(|f| {
                    let hidden = f.components.iter().any(|&c| !m.classes[c].effective);
                    (0..m.len())
                        .map(|x| {
                            let d: i64 = f.components.iter().zip(&f.coefficients).map(|(&c, &k)| k * m.gram[x][c]).sum();
                            if hidden {
                                assert_eq!(f.lambda, 2);
                                2 * d
                            } else {
                                assert_eq!(2 * d % f.lambda, 0);
                                2 * d / f.lambda
                            }
                        })
                        .collect()
                })
                .collect();
            assert_eq!(degrees.len(), 1, "{kind} {}", fib.type_string());
            let d = degrees.into_iter().next().unwrap();
            for &b in &fib.bisections {
                assert_eq!(d[b], 2);
            }
        }
    }
}

#[test]
fn i5_profiles_separate_mi_from_vii() {
    let profiles = |kind| -> BTreeSet<Vec<(String, Vec<&'static str>)>> {
        let m = model(kind);
        fibrations(kind)
            .iter()
            .filter(|f| f.type_string() == normalize("I5,I5,I1,I1"))
            .flat_map(|f| bisection_profiles(m, f).unwrap().into_iter().map(move |p| p.summary(f)).collect::<Vec<_>>())
            .collect()
    };
    let mi = profiles(SurfaceKind::MI);
    let vii = profiles(SurfaceKind::VII);
    assert_eq!(mi.len(), 1);
    assert_eq!(vii.len(), 2);
    assert!(mi.is_disjoint(&vii));
}

#[test]
fn torsion_section_models() {
    for (fibers, torsion, components, sections) in [
        (vec![I(6), I(6), I(6), I(6)], vec![6, 3], 24, 18),
        (vec![I(10), I(10), I(2), I(2)], vec![10], 24, 10),
        (vec![I(8), I(8), IStar(1)], vec![8], 22, 8),
    ] {
        let cfg = torsion_section_model(&fibers, &torsion).unwrap();
        let comp: u32 = fibers.iter().map(|k| k.components()).sum();
        assert_eq!(comp as usize, components);
        assert_eq!(cfg.sections().len(), sections);
        assert_eq!(cfg.labels.len(), components + sections);
        assert_eq!(sections, torsion.iter().product::<usize>());
        for s in cfg.sections() {
            for f in 0..cfg.fibers.len() {
                assert_eq!(cfg.fiber_degree(f, s), 1);
            }
        }
        for x in 0..cfg.labels.len() {
            let d: BTreeSet<i64> = (0..cfg.fibers.len()).map(|f| cfg.fiber_degree(f, x)).collect();
            assert_eq!(d.len(), 1);
        }
        let sig = signature(&enriques_core::exactlat::matrix::to_big(&cfg.gram));
        assert_eq!(sig.positive, 1);
    }
}

#[test]
fn torsion_models_rejected_when_inconsistent() {
    assert!(torsion_section_model(&[I(6), I(6), I(6), I(6)], &[7]).is_err());
}

#[test]
fn choice_independence_and_cross_checks() {
    let r = mi_choice_independence(ns()).unwrap();
    assert!(r.all_isomorphic());
    assert!(mi_torsion_cross_validation(ns()).unwrap().passed());
    assert!(torsion_uniqueness(&[I(10), I(10), I(2), I(2)], &[10]).unwrap().unique());
    let plane = build_plane();
    for ell in 0..21 {
        let flag = MIIFlag::default_for(&plane, ell);
        assert_eq!(mii_f_candidates(&plane, &flag).len(), 2);
    }
}

#[test]
fn mii_extras_come_from_special_hyperovals() {
    let b = build(SurfaceKind::MII);
    let plane = build_plane();
    let flag = MIIFlag::default_for(&plane, 0);
    let special: BTreeSet<Vec<BigInt>> = mii_special_hyperovals(&plane, &flag)
        .unwrap()
        .iter()
        .map(|h| ns().vector(&ns().hyperoval_class(h)).coords)
        .collect();
    let extras: BTreeSet<Vec<BigInt>> = b.extra_classes.iter().map(|c| ns().vector(c).coords).collect();
    assert_eq!(special.len(), 12);
    assert_eq!(extras, special);
    // each special hyperoval contains p1 and p2 and misses p3, p4, p5
    for h in mii_special_hyperovals(&plane, &flag).unwrap() {
        assert!(flag.p[..2].iter().all(|&p| h.contains(p)));
        assert!(flag.p[2..].iter().all(|&p| !h.contains(p)));
    }
}
