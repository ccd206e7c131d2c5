use enriques_core::exactlat::{
    self, build_lattice, generated_lattice, hyperbolic_plane, matrix, root_lattice, signature, Lattice, LatticeVector,
};
use enriques_core::nsmodel::{build_ns_model, GENERATORS};
use enriques_core::pg4::build_plane;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use std::sync::OnceLock;

/// Permutation-expansion determinant, small matrices only.
fn leibniz(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    fn go(k: usize, perm: &mut Vec<usize>, sign: i128, m: &[Vec<i64>], total: &mut i128) {
        let n = perm.len();
        if k == n {
            let p: i128 = (0..n).map(|i| m[i][perm[i]] as i128).product();
            *total += sign * p;
            return;
        }
        for j in k..n {
            perm.swap(k, j);
            go(k + 1, perm, if j == k { sign } else { -sign }, m, total);
            perm.swap(k, j);
        }
    }
    go(0, &mut perm, 1, m, &mut total);
    total
}

fn small(l: &Lattice) -> Vec<Vec<i64>> {
    l.gram().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
}

fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    matrix::to_big(m)
}

fn ns() -> &'static Lattice {
    static NS: OnceLock<Lattice> = OnceLock::new();
    NS.get_or_init(|| build_ns_model(&build_plane()).lattice().clone())
}

#[test]
fn root_lattice_determinants() {
    for m in 1..=8 {
        let l = root_lattice('A', m);
        assert_eq!(leibniz(&small(&l)).abs(), m as i128 + 1);
        assert_eq!(l.det().abs(), BigInt::from(m + 1));
    }
    for n in 4..=8 {
        let l = root_lattice('D', n);
        assert_eq!(leibniz(&small(&l)).abs(), 4);
        let sd = l.smith_invariants();
        let prod: BigInt = sd.elementary_divisors.iter().product();
        assert_eq!(prod, BigInt::from(4));
    }
    for (n, d) in [(6, 3), (7, 2), (8, 1)] {
        let l = root_lattice('E', n);
        assert_eq!(leibniz(&small(&l)).abs(), d);
        assert_eq!(l.det().abs(), BigInt::from(d));
    }
}

#[test]
fn worked_examples() {
    let a1 = build_lattice("A1").unwrap();
    assert_eq!(a1.det(), BigInt::from(-2));
    assert_eq!(hyperbolic_plane().det(), BigInt::from(-1));
    let u = hyperbolic_plane().signature();
    assert_eq!((u.positive, u.negative, u.zero), (1, 1, 0));
    let d4 = build_lattice("D4").unwrap();
    assert_eq!(d4.det(), BigInt::from(4));
    assert_eq!(d4.smith_invariants().elementary_divisors, [1, 1, 2, 2].map(BigInt::from));

    let e10 = build_lattice("(U + E8)(2)").unwrap();
    assert_eq!(e10.rank(), 10);
    assert_eq!(e10.det().abs(), BigInt::from(1024));
    // every entry of the twisted Gram is even and the untwisted one is unimodular
    let g = small(&e10);
    assert!(g.iter().flatten().all(|x| x % 2 == 0));
    let half: Vec<Vec<i64>> = g.iter().map(|r| r.iter().map(|x| x / 2).collect()).collect();
    assert_eq!(matrix::determinant(&big(&half)).abs(), BigInt::one());
    assert_eq!(e10.smith_invariants().group(), vec![BigInt::from(2); 10]);
    assert_eq!(e10.smith_invariants().two_elementary_a, Some(10));
}

#[test]
fn reflection_examples() {
    let a2 = root_lattice('A', 2);
    let d = LatticeVector::from_i64(&[1, 0]);
    assert_eq!(exactlat::reflect(&d, &d, &a2).unwrap(), LatticeVector::from_i64(&[-1, 0]));
    let u = hyperbolic_plane().direct_sum(&root_lattice('A', 1));
    let x = LatticeVector::from_i64(&[1, 1, 0]);
    let r = LatticeVector::from_i64(&[0, 0, 1]);
    assert_eq!(exactlat::reflect(&x, &r, &u).unwrap(), x);
}

#[test]
fn generated_lattice_of_repeated_root() {
    let g = vec![vec![-2i64; 3]; 3];
    let gl = generated_lattice(&big(&g)).unwrap();
    assert_eq!(gl.rank, 1);
    assert_eq!(gl.lattice.gram(), &vec![vec![BigInt::from(-2)]]);
}

/// Gram matrices with −2 on the diagonal and small off-diagonal entries.
fn even_gram(max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-1i64..=2, n * (n - 1) / 2).prop_map(move |upper| {
            let mut g = vec![vec![0i64; n]; n];
            let mut k = 0;
            for i in 0..n {
                g[i][i] = -2;
                for j in i + 1..n {
                    g[i][j] = upper[k];
                    g[j][i] = upper[k];
                    k += 1;
                }
            }
            g
        })
    })
}

fn nondegenerate_gram(max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    even_gram(max_n).prop_filter("non-degenerate", |g| leibniz(g) != 0)
}

/// Product of elementary matrices, so determinant ±1.
fn unimodular(n: usize, steps: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), steps).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, c, neg) in ops {
            if i != j {
                for row in u.iter_mut() {
                    row[j] += c * row[i];
                }
            }
            if neg {
                for row in u.iter_mut() {
                    row[i] = -row[i];
                }
            }
        }
        u
    })
}

fn congruence(g: &[Vec<BigInt>], u: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = g.len();
    let k = u[0].len();
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let mut s = BigInt::zero();
                    for i in 0..n {
                        for j in 0..n {
                            if u[i][a] != 0 && u[j][b] != 0 {
                                s += &g[i][j] * (u[i][a] * u[j][b]);
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn test_lattices() -> Vec<Lattice> {
    vec![
        hyperbolic_plane(),
        root_lattice('A', 3),
        root_lattice('D', 4),
        root_lattice('E', 8),
        build_lattice("U + E8").unwrap(),
        build_lattice("U(2) + D4 + A1").unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn signature_survives_unimodular_change(
        (which, u) in (0usize..6).prop_flat_map(|w| (Just(w), unimodular([2, 3, 4, 8, 10, 7][w], 12)))
    ) {
        let l = &test_lattices()[which];
        let h = congruence(l.gram(), &u);
        prop_assert_eq!(signature(&h), l.signature());
        prop_assert_eq!(matrix::determinant(&h), l.det());
    }

    #[test]
    fn ns_signature_survives_unimodular_change(u in unimodular(22, 40)) {
        let g = ns().gram();
        let h = congruence(g, &u);
        prop_assert_eq!(signature(&h), ns().signature());
        prop_assert_eq!(matrix::determinant(&h), BigInt::from(-4));
    }

    #[test]
    fn twist_scales_determinant(g in nondegenerate_gram(6), m in 1i64..6) {
        let l = Lattice::from_i64((0..g.len()).map(|i| format!("x{i}")).collect(), &g).unwrap();
        let t = l.twist(&BigInt::from(m)).unwrap();
        let expect = BigInt::from(leibniz(&g)) * BigInt::from(m).pow(g.len() as u32);
        prop_assert_eq!(t.det(), expect);
    }

    #[test]
    fn generated_lattice_is_identity_on_bases(g in nondegenerate_gram(6)) {
        let l = Lattice::from_i64((0..g.len()).map(|i| format!("x{i}")).collect(), &g).unwrap();
        let gl = generated_lattice(l.gram()).unwrap();
        prop_assert_eq!(gl.rank, l.rank());
        prop_assert_eq!(gl.lattice.det().abs(), l.det().abs());
        prop_assert_eq!(gl.lattice.smith_invariants().elementary_divisors, l.smith_invariants().elementary_divisors);
    }

    #[test]
    fn redundant_generators_give_same_lattice(
        g in nondegenerate_gram(5),
        extra in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 5), 1..4),
    ) {
        let n = g.len();
        let l = Lattice::from_i64((0..n).map(|i| format!("x{i}")).collect(), &g).unwrap();
        // columns: the basis itself, then integer combinations of it
        let k = n + extra.len();
        let p: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..k).map(|c| if c < n { i64::from(c == i) } else { extra[c - n][i] }).collect())
            .collect();
        let gl = generated_lattice(&congruence(l.gram(), &p)).unwrap();
        prop_assert_eq!(gl.rank, n);
        prop_assert_eq!(gl.lattice.det().abs(), l.det().abs());
        prop_assert_eq!(gl.lattice.smith_invariants().elementary_divisors, l.smith_invariants().elementary_divisors);
        prop_assert_eq!(gl.lattice.signature(), l.signature());
    }

    #[test]
    fn sublattice_index_identity(g in nondegenerate_gram(5), m in proptest::collection::vec(-3i64..=3, 25)) {
        let n = g.len();
        let mm: Vec<Vec<i64>> = (0..n).map(|i| m[i * 5..i * 5 + n].to_vec()).collect();
        let index = leibniz(&mm).abs();
        prop_assume!(index != 0);
        let s = congruence(&big(&g), &mm);
        prop_assert_eq!(
            matrix::determinant(&s).abs(),
            BigInt::from(leibniz(&g).abs()) * BigInt::from(index).pow(2)
        );
    }

    #[test]
    fn reflections_are_isometric_involutions(
        root in 0usize..GENERATORS,
        x in proptest::collection::vec(-6i64..=6, 22),
        y in proptest::collection::vec(-6i64..=6, 22),
    ) {
        let model = build_ns_model_cached();
        let lat = model.lattice();
        let d = model.vector(&model.generator(root));
        let x = LatticeVector::from_i64(&x);
        let y = LatticeVector::from_i64(&y);
        let sx = exactlat::reflect(&x, &d, lat).unwrap();
        let sy = exactlat::reflect(&y, &d, lat).unwrap();
        prop_assert_eq!(exactlat::reflect(&sx, &d, lat).unwrap(), x.clone());
        prop_assert_eq!(lat.pairing(&sx, &sy).unwrap(), lat.pairing(&x, &y).unwrap());
        prop_assert_eq!(lat.pairing(&sx, &d).unwrap(), -lat.pairing(&x, &d).unwrap());
    }

    #[test]
    fn root_lattice_reflections(n in 2usize..=8, i in 0usize..8, x in proptest::collection::vec(-9i64..=9, 8)) {
        let l = root_lattice('A', n);
        let i = i % n;
        let mut d = vec![0i64; n];
        d[i] = 1;
        let d = LatticeVector::from_i64(&d);
        let x = LatticeVector::from_i64(&x[..n]);
        let sx = exactlat::reflect(&x, &d, &l).unwrap();
        prop_assert_eq!(l.pairing(&sx, &sx).unwrap(), l.pairing(&x, &x).unwrap());
        prop_assert_eq!(exactlat::reflect(&sx, &d, &l).unwrap(), x);
    }
}

fn build_ns_model_cached() -> &'static enriques_core::nsmodel::NSModel {
    static M: OnceLock<enriques_core::nsmodel::NSModel> = OnceLock::new();
    M.get_or_init(|| build_ns_model(&build_plane()))
}

#[test]
fn minus_four_reflection_of_h() {
    let model = build_ns_model_cached();
    let plane = build_plane();
    let hs = enriques_core::pg4::hyperovals(&plane);
    let h = model.class_h(0);
    for s in &hs {
        let r = model.hyperoval_class(s);
        let hv = model.vector(&h);
        let rv = model.vector(&r);
        let lat = model.lattice();
        assert_eq!(lat.pairing(&hv, &rv).unwrap(), BigInt::from(4));
        let img = exactlat::reflect(&hv, &rv, lat).unwrap();
        let want: Vec<BigInt> = hv.coords.iter().zip(&rv.coords).map(|(a, b)| a + b * 2).collect();
        assert_eq!(img.coords, want);
        assert!(lat.pairing(&img, &img).unwrap() == BigInt::from(2));
    }
}
