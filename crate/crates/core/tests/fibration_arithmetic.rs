use enriques_core::fibrations::{
    admissible_types, all_rank12_candidates, audit_fibration, descend_fiber_type, descent_cases, ehs_root_candidates,
    fiber_list, rdp_string, rs_identity_check, y_catalog, y_catalog_audit, Ambient, FibError, FibrationConfig, Kodaira,
    KodairaFiber, Rdp, RdpMultiset,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// (symbol, components, euler, discriminant-group order).
fn table(sym: &str) -> (u32, u32, u64) {
    match sym {
        "IV*" => (7, 8, 3),
        "III*" => (8, 9, 2),
        "II*" => (9, 10, 1),
        "II" => (1, 2, 1),
        "III" => (2, 3, 2),
        "IV" => (3, 4, 3),
        s if s.ends_with('*') => {
            let n: u32 = s[1..s.len() - 1].parse().unwrap();
            (n + 5, n + 6, 4)
        }
        s => {
            let n: u32 = s[1..].parse().unwrap();
            (n, n, u64::from(n))
        }
    }
}

#[test]
fn catalog_audit_matches_shioda_tate() {
    let cat = y_catalog();
    assert_eq!(cat.len(), 8);
    for (fibers, audit) in y_catalog_audit() {
        let syms: Vec<String> = fibers.iter().map(|k| k.to_string()).collect();
        let euler: u32 = syms.iter().map(|s| table(s).1).sum();
        let delta = match syms.join(",").as_str() {
            "I8,I8,I1*" | "I16,I1*" => 1,
            "I12,I3*" => 3,
            _ => 0,
        };
        assert_eq!(euler + delta, 24, "{syms:?}");
        let triv = 2 + syms.iter().map(|s| table(s).0 - 1).sum::<u32>();
        let r = audit.unwrap();
        assert_eq!(r.euler_sum, euler);
        assert_eq!(r.wild_deficiency, delta);
        assert_eq!(r.trivial_rank, triv);
        assert_eq!(r.mw_rank, Some(22 - triv));
        if 22 == triv {
            let prod: u64 = syms.iter().map(|s| table(s).2).product();
            let t = r.torsion_order_candidates[0];
            assert_eq!(4 * t * t, prod, "{syms:?}");
        } else {
            assert!(r.torsion_order_candidates.is_empty());
        }
    }
}

#[test]
fn catalog_torsion_orders() {
    let got: Vec<Option<u64>> = y_catalog_audit()
        .into_iter()
        .map(|(_, a)| a.unwrap().torsion_order_candidates.first().copied())
        .collect();
    // (I8,I8,I1*), (I12,I3*) and (IV*,IV*,IV*) have positive Mordell-Weil rank
    assert_eq!(got, vec![Some(18), None, Some(10), None, Some(6), None, Some(4), Some(6)]);
}

#[test]
fn audit_rejections() {
    let too_many = FibrationConfig::parse("(I12,I12,I2)", Ambient::K3).unwrap();
    assert_eq!(audit_fibration(&too_many), Err(FibError::EulerExceeded { euler: 26, c2: 24 }));
    let slack = FibrationConfig::parse("(I10,I10)", Ambient::K3).unwrap();
    assert!(matches!(audit_fibration(&slack), Err(FibError::MultiplicativeSlack { .. })));
    let mult = FibrationConfig::parse("(2I4,I8)", Ambient::K3).unwrap();
    assert_eq!(audit_fibration(&mult), Err(FibError::MultipleOnK3));
    assert!(matches!(FibrationConfig::parse("(I4,J2)", Ambient::K3), Err(FibError::Symbol(_))));
    assert!(matches!("I0".parse::<Kodaira>(), Err(FibError::Symbol(_))));
    assert!(matches!("quartic".parse::<Ambient>(), Err(FibError::Ambient(_))));
}

#[test]
fn enriques_audits() {
    let amb = Ambient::EnriquesSupersingular;
    let cfg = FibrationConfig::parse("(I4,I4,2III)", amb).unwrap();
    let r = audit_fibration(&cfg).unwrap();
    assert_eq!(r.euler_sum, 11);
    assert_eq!(r.wild_deficiency, 1);
    assert_eq!(r.mw_rank, None);
    let cfg = FibrationConfig::parse("(I9,I1,I1,I1)", amb).unwrap();
    assert_eq!(audit_fibration(&cfg).unwrap().wild_deficiency, 0);
}

#[test]
fn fiber_descent() {
    for n in 1..=9 {
        let (f, opts) = descend_fiber_type(Kodaira::I(2 * n)).unwrap();
        assert_eq!(f, Kodaira::I(n));
        assert_eq!(opts.len(), 1);
        assert_eq!(opts[0].lattice, RdpMultiset::from([(Rdp::A1, n)]));
    }
    assert_eq!(descend_fiber_type(Kodaira::IStar(1)).unwrap().0, Kodaira::III);
    assert_eq!(descend_fiber_type(Kodaira::IStar(3)).unwrap().0, Kodaira::III);
    assert_eq!(descend_fiber_type(Kodaira::IVStar).unwrap().0, Kodaira::IV);
    assert_eq!(descend_fiber_type(Kodaira::I(3)), Err(FibError::Unsupported(Kodaira::I(3))));
    // every option of a fiber has the same rank as the K3 fiber minus one
    for g in y_catalog().into_iter().flatten() {
        let (_, opts) = descend_fiber_type(g).unwrap();
        for o in opts {
            let rank: u32 = o.lattice.iter().map(|(r, c)| r.rank() * c).sum();
            assert!(rank <= g.components() - 1, "{g}");
        }
    }
}

fn ms(items: &[(Rdp, u32)]) -> RdpMultiset {
    items.iter().copied().collect()
}

#[test]
fn rank_twelve_candidates() {
    // brute force over A1^a D4^b D6^c D8^d D10^e D12^f E7^g E8^h
    let mut want = BTreeSet::new();
    let mut total = 0;
    for a in 0..=12u32 {
        for b in 0..=3u32 {
            for c in 0..=2u32 {
                for d in 0..=1u32 {
                    for e in 0..=1u32 {
                        for f in 0..=1u32 {
                            for g in 0..=1u32 {
                                for h in 0..=1u32 {
                                    if a + 4 * b + 6 * c + 8 * d + 10 * e + 12 * f + 7 * g + 8 * h != 12 {
                                        continue;
                                    }
                                    total += 1;
                                    if a + 2 * (b + c + d + e + f) + g >= 8 {
                                        let parts = [
                                            (Rdp::A1, a),
                                            (Rdp::D(4), b),
                                            (Rdp::D(6), c),
                                            (Rdp::D(8), d),
                                            (Rdp::D(10), e),
                                            (Rdp::D(12), f),
                                            (Rdp::E7, g),
                                            (Rdp::E8, h),
                                        ];
                                        want.insert(parts.into_iter().filter(|p| p.1 > 0).collect::<RdpMultiset>());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert_eq!(all_rank12_candidates().len(), total);
    let got: BTreeSet<RdpMultiset> = ehs_root_candidates().into_iter().map(|c| c.parts).collect();
    assert_eq!(got, want);
    let expected: BTreeSet<RdpMultiset> = [
        ms(&[(Rdp::A1, 12)]),
        ms(&[(Rdp::A1, 8), (Rdp::D(4), 1)]),
        ms(&[(Rdp::A1, 6), (Rdp::D(6), 1)]),
        ms(&[(Rdp::A1, 4), (Rdp::D(4), 2)]),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, expected);
    let names: BTreeSet<String> = got.iter().map(rdp_string).collect();
    assert!(names.contains("A1^8+D4"));
}

fn types(list: &[&str]) -> BTreeSet<String> {
    list.iter()
        .map(|s| {
            let mut v: Vec<KodairaFiber> = s.split(',').map(|t| t.parse().unwrap()).collect();
            v.sort();
            fiber_list(&v)
        })
        .collect()
}

fn admissible(lat: &RdpMultiset, special: bool) -> BTreeSet<String> {
    admissible_types(lat, special)
        .into_iter()
        .map(|v| {
            let mut f: Vec<KodairaFiber> = v.into_iter().map(KodairaFiber::new).collect();
            f.sort();
            fiber_list(&f)
        })
        .collect()
}

#[test]
fn possible_fiber_types_per_lattice() {
    assert_eq!(
        admissible(&ms(&[(Rdp::A1, 12)]), true),
        types(&["I3,I3,I3,I3", "I4,I4,III", "I5,I5,I1,I1", "I6,I2,IV", "I8,III", "I9,I1,I1,I1"])
    );
    assert_eq!(
        admissible(&ms(&[(Rdp::A1, 8), (Rdp::D(4), 1)]), false),
        types(&["I4,I4,III", "I6,III", "I6,I2,IV", "IV,IV,IV", "I8,III"])
    );
    assert_eq!(admissible(&ms(&[(Rdp::A1, 6), (Rdp::D(6), 1)]), false), types(&["I6,III"]));
    assert_eq!(admissible(&ms(&[(Rdp::A1, 4), (Rdp::D(4), 2)]), false), types(&["IV,IV,IV"]));
}

#[test]
fn descent_cases_are_consistent() {
    let cands: Vec<RdpMultiset> = ehs_root_candidates().into_iter().map(|c| c.parts).collect();
    for c in descent_cases() {
        assert!(cands.contains(&c.lattice));
        let rank: u32 = c.lattice.iter().map(|(r, n)| r.rank() * n).sum();
        assert_eq!(rank, 12);
        assert_eq!(c.g.len(), c.f.len());
    }
}

#[test]
fn noether_type_identity() {
    assert!(rs_identity_check(24, 0, 0, -24));
    assert!(!rs_identity_check(24, 0, 0, 24));
}

fn kodaira() -> impl Strategy<Value = Kodaira> {
    prop_oneof![
        (1u32..30).prop_map(Kodaira::I),
        (0u32..15).prop_map(Kodaira::IStar),
        Just(Kodaira::II),
        Just(Kodaira::III),
        Just(Kodaira::IV),
        Just(Kodaira::IVStar),
        Just(Kodaira::IIIStar),
        Just(Kodaira::IIStar),
    ]
}

proptest! {
    #[test]
    fn symbols_round_trip(k in kodaira(), multiple in any::<bool>()) {
        let f = KodairaFiber { kind: k, multiple };
        prop_assert_eq!(f.to_string().parse::<KodairaFiber>().unwrap(), f);
        let (c, e, _) = table(&k.to_string());
        prop_assert_eq!(k.components(), c);
        prop_assert_eq!(k.euler(), e);
    }

    #[test]
    fn audit_is_shioda_tate(ks in proptest::collection::vec(kodaira(), 1..6)) {
        let cfg = FibrationConfig::k3(&ks);
        let euler: u32 = ks.iter().map(|k| k.euler()).sum();
        let triv = 2 + ks.iter().map(|k| k.components() - 1).sum::<u32>();
        match audit_fibration(&cfg) {
            Ok(r) => {
                prop_assert!(euler <= 24 && triv <= 22);
                prop_assert_eq!(r.euler_sum + r.wild_deficiency, 24);
                prop_assert_eq!(r.mw_rank, Some(22 - triv));
            }
            Err(FibError::EulerExceeded { euler: e, .. }) => prop_assert!(e == euler && euler > 24),
            Err(FibError::MultiplicativeSlack { .. }) => prop_assert!(ks.iter().all(|k| k.is_multiplicative()) && euler < 24),
            Err(FibError::RankExceeded(r)) => prop_assert!(r == triv && triv > 22),
            Err(FibError::NoTorsion(p)) => {
                prop_assert_eq!(triv, 22);
                prop_assert!(p % 4 != 0 || (1..=p).all(|t| 4 * t * t != p));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}
