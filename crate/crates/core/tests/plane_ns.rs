use enriques_core::exactlat::{signature, Signature};
use enriques_core::nsmodel::{self, build_ns_model, GENERATORS};
use enriques_core::pg4::{self, build_plane, hyperovals, mi_base_configurations, MIIFlag, N};
use num_bigint::BigInt;
use std::collections::HashSet;

#[test]
fn two_points_span_one_line() {
    let plane = build_plane();
    for p in 0..N {
        for q in p + 1..N {
            assert_eq!((plane.incidence[p] & plane.incidence[q]).count_ones(), 1);
        }
    }
    for l in 0..N {
        for m in l + 1..N {
            assert_eq!((plane.on_line[l] & plane.on_line[m]).count_ones(), 1);
        }
    }
}

#[test]
fn hyperoval_census() {
    let plane = build_plane();
    let hs = hyperovals(&plane);
    assert_eq!(hs.len(), 168);
    assert_eq!(hs.iter().collect::<HashSet<_>>().len(), 168);
    assert!(hs.windows(2).all(|w| w[0] < w[1]));
    for h in &hs {
        for l in 0..N {
            assert!(matches!(plane.meets_in(l, h.mask()), 0 | 2));
        }
    }
    for p in 0..N {
        assert_eq!(hs.iter().filter(|h| h.contains(p)).count(), 48);
    }
}

#[test]
fn mi_base_configuration_structure() {
    let plane = build_plane();
    let cfgs = mi_base_configurations(&plane);
    assert!(!cfgs.is_empty());
    for c in &cfgs {
        assert_eq!(c.trisecants.len(), 12);
        assert_eq!(c.tangents.len(), 9);
        assert_eq!(c.triangles.len(), 4);
        let base = c.base_mask();
        for t in &c.triangles {
            let cover = t.iter().fold(0, |m, &l| m | (plane.on_line[l] & base));
            assert_eq!(cover, base);
        }
        let verts: HashSet<usize> = c.all_vertices().into_iter().collect();
        assert_eq!(verts.len(), 12);
        assert!(verts.iter().all(|v| base >> v & 1 == 0));
        for &b in &c.base {
            assert_eq!(c.trisecants.iter().filter(|&&l| plane.incident(b, l)).count(), 4);
            assert_eq!(c.tangents.iter().filter(|&&l| plane.incident(b, l)).count(), 1);
        }
        let vmask = pg4::mask_of(&c.all_vertices());
        for &t in &c.tangents {
            assert_eq!(plane.meets_in(t, vmask), 4);
        }
    }
}

#[test]
fn special_hyperovals_of_default_flag() {
    let plane = build_plane();
    let flag = MIIFlag::default_for(&plane, 0);
    let hs = pg4::mii_special_hyperovals(&plane, &flag).unwrap();
    assert_eq!(hs.len(), 12);
    for h in &hs {
        assert!(h.contains(flag.p[0]) && h.contains(flag.p[1]));
        for &m in flag.l.iter().flatten() {
            assert_eq!(plane.meets_in(m, h.mask()), 2);
        }
    }
    let mut bad = flag.clone();
    bad.l[0][0] = flag.l[1][0];
    assert!(pg4::mii_special_hyperovals(&plane, &bad).is_err());
}

#[test]
fn ns_lattice_invariants() {
    let plane = build_plane();
    let m = build_ns_model(&plane);
    assert_eq!(m.induced.rank, 22);
    assert_eq!(m.lattice().det(), BigInt::from(-4));
    let d = m.discriminant();
    assert_eq!(d.group(), vec![BigInt::from(2), BigInt::from(2)]);
    assert_eq!(d.two_elementary_a, Some(2));
    assert_eq!(m.lattice().signature(), Signature { positive: 1, negative: 21, zero: 0 });
    let big = enriques_core::exactlat::matrix::to_big(&m.gram42);
    assert_eq!(signature(&big), Signature { positive: 1, negative: 21, zero: 20 });
    for i in 0..GENERATORS {
        let deg = (0..GENERATORS).filter(|&j| m.gram42[i][j] == 1).count();
        assert_eq!(deg, 5);
    }
}

#[test]
fn h_is_well_defined() {
    let plane = build_plane();
    let m = build_ns_model(&plane);
    let hs: Vec<_> = (0..N).map(|l| m.class_h(l)).collect();
    for a in &hs {
        assert_eq!(m.pair(&a.coords, &a.coords), 2);
        assert_eq!(a, &hs[0]);
        for p in 0..N {
            assert_eq!(m.pair_generator(&a.coords, nsmodel::e_index(p)), 0);
        }
        for l in 0..N {
            assert_eq!(m.pair_generator(&a.coords, nsmodel::l_index(l)), 1);
        }
    }
}
