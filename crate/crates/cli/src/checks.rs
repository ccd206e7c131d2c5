//! The verification checks and the lazily built objects they share.

use crate::report::{CheckResult, Scope, Status};
use enriques_core::dynkin::{automorphism_count, enumerate_parabolics, vinberg_check, Parabolic, VinbergReport, WeightedGraph};
use enriques_core::exactlat::matrix::signature;
use enriques_core::exactlat::{self, abs_det, generated_lattice_i64, LatticeVector};
use enriques_core::fibrations::{
    admissible_types, ehs_root_candidates, fiber_list, rdp_string, rs_identity_check, y_catalog_audit, Kodaira, KodairaFiber, Rdp,
    RdpMultiset,
};
use enriques_core::nsmodel::{build_ns_model, e_index, l_index, NSModel, GENERATORS};
use enriques_core::pg4::{build_plane, hyperovals, mii_special_hyperovals, MIIFlag, Plane, N};
use enriques_core::quotient::checks as qchecks;
use enriques_core::quotient::config::mii_f_candidates;
use enriques_core::quotient::{
    bisection_profiles, build_surface_with, derive_fibrations, torsion_section_model, HitKind, PointType, SurfaceBuild, SurfaceKind,
    XFiber, XFibration, XModel,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};

pub const KINDS: [SurfaceKind; 3] = [SurfaceKind::MI, SurfaceKind::VII, SurfaceKind::MII];

fn slot(kind: SurfaceKind) -> usize {
    match kind {
        SurfaceKind::MI => 0,
        SurfaceKind::VII => 1,
        SurfaceKind::MII => 2,
    }
}

/// Shared inputs, built on first use.
#[derive(Default)]
pub struct Context {
    corrupt_gram: bool,
    plane: OnceCell<Plane>,
    ns: OnceCell<NSModel>,
    builds: [OnceCell<Result<SurfaceBuild, String>>; 3],
    fibrations: [OnceCell<Result<Vec<XFibration>, String>>; 3],
    vinberg: [OnceCell<Result<VinbergReport, String>>; 3],
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Negative control: flips one incidence entry of the generator Gram.
    pub fn with_corrupted_gram() -> Self {
        Context {
            corrupt_gram: true,
            ..Self::default()
        }
    }

    pub fn plane(&self) -> &Plane {
        self.plane.get_or_init(build_plane)
    }

    pub fn ns(&self) -> &NSModel {
        self.ns.get_or_init(|| {
            let mut ns = build_ns_model(self.plane());
            if self.corrupt_gram {
                let (i, j) = (e_index(0), l_index(0));
                let v = 1 - ns.gram42[i][j];
                ns.gram42[i][j] = v;
                ns.gram42[j][i] = v;
                ns.induced = generated_lattice_i64(&ns.gram42).expect("corrupted Gram stays even and symmetric");
            }
            ns
        })
    }

    pub fn build(&self, kind: SurfaceKind) -> Result<&SurfaceBuild, String> {
        self.builds[slot(kind)]
            .get_or_init(|| build_surface_with(kind, self.ns()).map_err(|e| format!("{kind}: {e}")))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn model(&self, kind: SurfaceKind) -> Result<&XModel, String> {
        Ok(&self.build(kind)?.model)
    }

    pub fn fibrations(&self, kind: SurfaceKind) -> Result<&[XFibration], String> {
        let model = self.model(kind)?;
        self.fibrations[slot(kind)]
            .get_or_init(|| derive_fibrations(model).map_err(|e| format!("{kind}: {e}")))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    pub fn vinberg(&self, kind: SurfaceKind) -> Result<&VinbergReport, String> {
        let model = self.model(kind)?;
        self.vinberg[slot(kind)]
            .get_or_init(|| vinberg_check(&model.graph(), 9).map_err(|e| format!("{kind}: {e}")))
            .as_ref()
            .map_err(Clone::clone)
    }
}

type Outcome = Result<(bool, Value), String>;

struct CheckDef {
    id: &'static str,
    group: &'static str,
    description: &'static str,
    anchor: &'static str,
    scopes: &'static [Scope],
    run: fn(&Context) -> Outcome,
}

const PLANE: &str = "projective plane";
const LATTICE: &str = "lattice model";
const MODELS: &str = "surface models";
const REFLECTION: &str = "reflection groups";
const FIBRATIONS: &str = "elliptic fibrations";
const ARITHMETIC: &str = "fibration arithmetic";
const SYMMETRY: &str = "symmetry";
const PROPERTIES: &str = "properties";

use Scope::{Fibrations as Fib, Lattices as Lat, Mi, Mii, Plane as Pl, Vii};

const CHECKS: &[CheckDef] = &[
    CheckDef {
        id: "ac01",
        group: PLANE,
        description: "PG(2,4) has 21 points, 21 lines, 5/5 incidence, projective axioms",
        anchor: "plane over F4",
        scopes: &[Pl],
        run: plane_axioms,
    },
    CheckDef {
        id: "ac02",
        group: PLANE,
        description: "168 hyperovals, every line meets each in 0 or 2 points",
        anchor: "hyperovals of the plane",
        scopes: &[Pl],
        run: hyperoval_census,
    },
    CheckDef {
        id: "special-hyperovals-count",
        group: PLANE,
        description: "special-hyperovals-count = 12",
        anchor: "six-point sets through p1, p2 meeting each l_ij once",
        scopes: &[Pl, Mii],
        run: special_hyperovals,
    },
    CheckDef {
        id: "ac03",
        group: LATTICE,
        description: "NS lattice: rank 22, det -4, discriminant (Z/2)^2, signature (1,21)",
        anchor: "42 curves generate NS of the K3",
        scopes: &[Lat],
        run: ns_invariants,
    },
    CheckDef {
        id: "ac04",
        group: LATTICE,
        description: "168 classes 2h - sum E: norm -4, even pairing, integral reflections",
        anchor: "the 168 (-4)-vectors",
        scopes: &[Lat],
        run: minus_four_classes,
    },
    CheckDef {
        id: "model-lattices",
        group: LATTICE,
        description: "each descended model spans rank 10, signature (1,9)",
        anchor: "Num of an Enriques surface",
        scopes: &[Lat, Mi, Vii, Mii],
        run: model_lattices,
    },
    CheckDef {
        id: "ac05",
        group: MODELS,
        description: "orthogonality filters: MI keeps 10, MII keeps 12 = special hyperovals",
        anchor: "non-effective classes from hyperovals",
        scopes: &[Mi, Mii],
        run: orthogonality_filters,
    },
    CheckDef {
        id: "ac06",
        group: MODELS,
        description: "MI 30+10 with 12 A1 points and 15+15 tangencies; VII 20 curves; MII 28+12, 8 A1 + 1 D4, extra pattern 7/4",
        anchor: "configurations of nodal curves",
        scopes: &[Mi, Vii, Mii],
        run: surface_models,
    },
    CheckDef {
        id: "mi-choice-independence",
        group: MODELS,
        description: "every admissible integral assignment gives an isomorphic MI graph",
        anchor: "choice of integral curves",
        scopes: &[Mi],
        run: mi_choice,
    },
    CheckDef {
        id: "mi-torsion-rebuild",
        group: MODELS,
        description: "MI rebuilt from the (I6^4; Z/6 x Z/3) section solver matches the plane model",
        anchor: "sections of the I6^4 fibration",
        scopes: &[Mi],
        run: mi_cross_validation,
    },
    CheckDef {
        id: "vii-section-uniqueness",
        group: MODELS,
        description: "all (I10,I10,I2,I2; Z/10) section configurations are isomorphic",
        anchor: "ten sections of the VII fibration",
        scopes: &[Vii],
        run: vii_uniqueness,
    },
    CheckDef {
        id: "mii-fiber-line-choice",
        group: MODELS,
        description: "exactly two lines qualify for F1, F2",
        anchor: "lines through the compatible point",
        scopes: &[Mii],
        run: mii_line_choice,
    },
    CheckDef {
        id: "ac07",
        group: REFLECTION,
        description: "Vinberg check at n = 9, all maximal parabolics of rank 8, MII type list with two A5+A2+A1 flavors",
        anchor: "finite index of the reflection subgroup",
        scopes: &[Mi, Vii, Mii],
        run: vinberg_all,
    },
    CheckDef {
        id: "ac08",
        group: FIBRATIONS,
        description: "fibration types derived from each model, with multiplicities",
        anchor: "lists of elliptic fibrations",
        scopes: &[Mi, Vii, Mii, Fib],
        run: fibration_lists,
    },
    CheckDef {
        id: "ac09",
        group: FIBRATIONS,
        description: "bisection profiles over all bisections of every fibration",
        anchor: "special bisections",
        scopes: &[Mi, Vii, Mii, Fib],
        run: bisection_lemmas,
    },
    CheckDef {
        id: "fiber-types-admissible",
        group: FIBRATIONS,
        description: "every derived fibration is admitted by the model's singularity lattice",
        anchor: "possible singular fibers",
        scopes: &[Mi, Vii, Mii, Fib],
        run: fiber_types_admissible,
    },
    CheckDef {
        id: "ac10",
        group: ARITHMETIC,
        description: "K3 catalog audits, section counts 18 and 10, torsion orders",
        anchor: "Shioda-Tate and Euler numbers",
        scopes: &[Fib],
        run: catalog_audit,
    },
    CheckDef {
        id: "ac11",
        group: ARITHMETIC,
        description: "rank-12 root lattices with a >= 8 are A1^12, A1^8+D4, A1^6+D6, A1^4+D4^2",
        anchor: "singularities of the canonical cover",
        scopes: &[Fib],
        run: ehs_candidates,
    },
    CheckDef {
        id: "possible-fiber-types",
        group: ARITHMETIC,
        description: "fiber types admitted by each candidate singularity lattice",
        anchor: "possible singularities of the canonical cover",
        scopes: &[Fib],
        run: possible_fiber_types,
    },
    CheckDef {
        id: "rs-identity",
        group: ARITHMETIC,
        description: "c2 = deg<D> - K.D - D^2 holds for the K3 cover (24 = 0 - 0 + 24)",
        anchor: "Rudakov-Shafarevich formula",
        scopes: &[Fib],
        run: rs_identity,
    },
    CheckDef {
        id: "ac12",
        group: SYMMETRY,
        description: "MII graph automorphism order 1152 with effectivity respected",
        anchor: "symmetry group (S4 x S4).2",
        scopes: &[Mii],
        run: mii_automorphisms,
    },
    CheckDef {
        id: "ac13",
        group: PROPERTIES,
        description: "reflections (10^4), unimodular conjugation (100), ledger sums, MI choice isomorphism",
        anchor: "exact invariants",
        scopes: &[Lat, Mi, Vii, Mii],
        run: property_suites,
    },
];

/// Check ids in run order, with their scopes.
pub fn check_ids() -> Vec<(&'static str, &'static [Scope])> {
    CHECKS.iter().map(|c| (c.id, c.scopes)).collect()
}

pub fn run_checks(scope: Scope, ctx: &Context) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .filter(|c| scope == Scope::All || c.scopes.contains(&scope))
        .map(|c| run_one(c, ctx))
        .collect()
}

/// Run a single check by id, regardless of scope.
pub fn run_check(id: &str, ctx: &Context) -> Option<CheckResult> {
    CHECKS.iter().find(|c| c.id == id).map(|c| run_one(c, ctx))
}

fn run_one(c: &CheckDef, ctx: &Context) -> CheckResult {
    let (status, witness) = match (c.run)(ctx) {
        Ok((true, w)) => (Status::Pass, w),
        Ok((false, w)) => (Status::Fail, w),
        Err(e) => (Status::Fail, json!({ "error": e })),
    };
    CheckResult {
        id: c.id.to_string(),
        group: c.group.to_string(),
        description: c.description.to_string(),
        anchor: c.anchor.to_string(),
        status,
        witness,
    }
}

fn first<T: Clone>(v: &[T], k: usize) -> Vec<T> {
    v.iter().take(k).cloned().collect()
}

fn plane_axioms(ctx: &Context) -> Outcome {
    let p = ctx.plane();
    let distinct_points = p.points.iter().collect::<BTreeSet<_>>().len();
    let distinct_lines = p.lines.iter().collect::<BTreeSet<_>>().len();
    let line_sizes: BTreeSet<usize> = (0..N).map(|l| p.points_on(l).len()).collect();
    let pencil_sizes: BTreeSet<usize> = (0..N).map(|q| p.lines_through(q).len()).collect();
    let mut bad = Vec::new();
    for a in 0..N {
        for b in a + 1..N {
            let joins = (0..N).filter(|&l| p.incident(a, l) && p.incident(b, l)).count();
            if joins != 1 {
                bad.push(json!({ "points": [a, b], "lines": joins }));
            }
            let meets = (0..N).filter(|&q| p.incident(q, a) && p.incident(q, b)).count();
            if meets != 1 {
                bad.push(json!({ "lines": [a, b], "points": meets }));
            }
        }
    }
    let collinear = |a: usize, b: usize, c: usize| p.incident(c, p.line_through(a, b));
    let quadrangle = (0..N).any(|a| {
        (a + 1..N).any(|b| {
            (b + 1..N).any(|c| !collinear(a, b, c) && (c + 1..N).any(|d| !collinear(a, b, d) && !collinear(a, c, d) && !collinear(b, c, d)))
        })
    });
    let ok = p.points.len() == 21
        && p.lines.len() == 21
        && distinct_points == 21
        && distinct_lines == 21
        && line_sizes == BTreeSet::from([5])
        && pencil_sizes == BTreeSet::from([5])
        && bad.is_empty()
        && quadrangle;
    Ok((
        ok,
        json!({
            "points": p.points.len(),
            "lines": p.lines.len(),
            "points_per_line": line_sizes,
            "lines_per_point": pencil_sizes,
            "axiom_failures": first(&bad, 5),
            "quadrangle": quadrangle,
        }),
    ))
}

/// Six-point subsets with no three collinear, by brute force over all
/// 54264 subsets.
fn arcs_of_six(p: &Plane) -> Vec<u32> {
    fn go(p: &Plane, start: usize, mask: u32, size: usize, out: &mut Vec<u32>) {
        if size == 6 {
            out.push(mask);
            return;
        }
        for q in start..N {
            let m = mask | 1 << q;
            if (0..N).all(|l| p.meets_in(l, m) <= 2) {
                go(p, q + 1, m, size + 1, out);
            }
        }
    }
    let mut out = Vec::new();
    go(p, 0, 0, 0, &mut out);
    out
}

fn hyperoval_census(ctx: &Context) -> Outcome {
    let p = ctx.plane();
    let hs = hyperovals(p);
    let masks: BTreeSet<u32> = hs.iter().map(|h| h.mask()).collect();
    let secancy: BTreeSet<u32> = hs.iter().flat_map(|h| (0..N).map(move |l| p.meets_in(l, h.mask()))).collect();
    let sizes: BTreeSet<u32> = masks.iter().map(|m| m.count_ones()).collect();
    let brute: BTreeSet<u32> = arcs_of_six(p).into_iter().collect();
    let ok = hs.len() == 168 && masks.len() == 168 && sizes == BTreeSet::from([6]) && secancy == BTreeSet::from([0, 2]) && brute == masks;
    Ok((
        ok,
        json!({
            "count": hs.len(),
            "distinct": masks.len(),
            "line_secancy": secancy,
            "brute_force_count": brute.len(),
            "brute_force_agrees": brute == masks,
        }),
    ))
}

fn special_hyperovals(ctx: &Context) -> Outcome {
    let p = ctx.plane();
    let flag = MIIFlag::default_for(p, 0);
    let hs = mii_special_hyperovals(p, &flag).map_err(|e| e.to_string())?;
    let hs: Vec<Vec<usize>> = hs.iter().map(|h| h.0.to_vec()).collect();
    Ok((hs.len() == 12, json!({ "count": hs.len(), "flag": { "p": flag.p, "l": flag.l }, "sets": hs })))
}

fn ns_invariants(ctx: &Context) -> Outcome {
    let ns = ctx.ns();
    let lat = ns.lattice();
    let group: Vec<String> = ns.discriminant().group().iter().map(|x| x.to_string()).collect();
    let sig = lat.signature();
    let ok = lat.rank() == 22
        && lat.det() == BigInt::from(-4)
        && group == ["2", "2"]
        && (sig.positive, sig.negative, sig.zero) == (1, 21, 0);
    Ok((
        ok,
        json!({
            "rank": lat.rank(),
            "det": lat.det().to_string(),
            "discriminant_group": group,
            "signature": [sig.positive, sig.negative, sig.zero],
        }),
    ))
}

fn minus_four_classes(ctx: &Context) -> Outcome {
    let ns = ctx.ns();
    let lat = ns.lattice();
    let hs = hyperovals(ctx.plane());
    let gens: Vec<LatticeVector> = (0..GENERATORS).map(|i| ns.vector(&ns.generator(i))).collect();
    let mut bad = Vec::new();
    for h in &hs {
        let r = ns.hyperoval_class(h);
        let norm = ns.pair(&r.coords, &r.coords);
        let rv = ns.vector(&r);
        let reduced_norm = lat.pairing(&rv, &rv).map_err(|e| e.to_string())?;
        let odd: Vec<usize> = (0..GENERATORS).filter(|&i| ns.pair_generator(&r.coords, i) % 2 != 0).collect();
        let non_integral = gens.iter().filter(|g| exactlat::reflect(g, &rv, lat).is_err()).count();
        if norm != -4 || reduced_norm != BigInt::from(-4) || !odd.is_empty() || non_integral > 0 {
            bad.push(json!({
                "points": h.0,
                "norm": norm,
                "odd_pairings": odd,
                "non_integral_reflections": non_integral,
            }));
        }
    }
    Ok((hs.len() == 168 && bad.is_empty(), json!({ "classes": hs.len(), "failures": first(&bad, 5) })))
}

fn model_lattices(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut w = BTreeMap::new();
    for kind in KINDS {
        let lat = ctx.model(kind)?.lattice().map_err(|e| e.to_string())?;
        let sig = lat.lattice.signature();
        ok &= lat.rank == 10 && (sig.positive, sig.negative, sig.zero) == (1, 9, 0);
        w.insert(
            kind.to_string(),
            json!({ "rank": lat.rank, "signature": [sig.positive, sig.negative, sig.zero], "det": lat.lattice.det().to_string() }),
        );
    }
    Ok((ok, json!(w)))
}

fn orthogonality_filters(ctx: &Context) -> Outcome {
    let ns = ctx.ns();
    let mi = ctx.build(SurfaceKind::MI)?;
    let mii = ctx.build(SurfaceKind::MII)?;
    let flag = MIIFlag::default_for(ctx.plane(), 0);
    let special: BTreeSet<Vec<BigInt>> = mii_special_hyperovals(ctx.plane(), &flag)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|h| ns.hyperoval_class(h).reduced)
        .collect();
    let kept: BTreeSet<Vec<BigInt>> = mii.extra_classes.iter().map(|c| c.reduced.clone()).collect();
    let ok = mi.extra_classes.len() == 10 && mii.extra_classes.len() == 12 && kept == special;
    Ok((
        ok,
        json!({
            "mi_kept": mi.extra_classes.len(),
            "mii_kept": mii.extra_classes.len(),
            "mii_special": special.len(),
            "mii_equals_special": kept == special,
        }),
    ))
}

fn canonical_types(model: &XModel) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for p in model.canonical_points() {
        if let PointType::Canonical(t) = model.point_type(p) {
            *m.entry(t.clone()).or_insert(0) += 1;
        }
    }
    m
}

fn is_tangency(model: &XModel, a: usize, b: usize) -> bool {
    model.gram[a][b] == 2 && matches!(model.contributions(a, b), [c] if c.multiplicity == 2)
}

/// The 30 MI curves split into two sets of 15 by shared canonical points;
/// each set is the complete graph on its 6 points, members meet only at
/// canonical points, and each curve is tangent to 3 curves of the other set.
fn mi_structure(model: &XModel) -> (bool, Value) {
    let curves = model.curves();
    let through: Vec<Vec<usize>> = curves.iter().map(|&c| model.points_on(c)).collect();
    let two_points = through.iter().all(|p| p.len() == 2 && p.iter().all(|&q| model.points[q].is_canonical()));
    let n = curves.len();
    let mut part = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if part[s] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut stack = vec![s];
        part[s] = id;
        let mut members = Vec::new();
        while let Some(x) = stack.pop() {
            members.push(x);
            for y in 0..n {
                if part[y] == usize::MAX && through[x].iter().any(|q| through[y].contains(q)) {
                    part[y] = id;
                    stack.push(y);
                }
            }
        }
        parts.push(members);
    }
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    let complete = parts.iter().all(|ms| {
        let pts: BTreeSet<usize> = ms.iter().flat_map(|&i| through[i].iter().copied()).collect();
        let pairs: BTreeSet<Vec<usize>> = ms.iter().map(|&i| through[i].clone()).collect();
        pts.len() == 6 && pairs.len() == 15
    });
    let mut within_ok = true;
    let mut tangent_counts = BTreeSet::new();
    for i in 0..n {
        let mut t = 0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (curves[i], curves[j]);
            if part[i] == part[j] {
                within_ok &= model.contributions(a, b).iter().all(|c| c.point.is_some_and(|q| model.points[q].is_canonical()))
                    && !is_tangency(model, a, b);
            } else if is_tangency(model, a, b) {
                t += 1;
            }
        }
        tangent_counts.insert(t);
    }
    let ok = two_points && sizes == [15, 15] && complete && within_ok && tangent_counts == BTreeSet::from([3]);
    (
        ok,
        json!({
            "two_canonical_points_each": two_points,
            "set_sizes": sizes,
            "sets_are_complete_graphs_on_six_points": complete,
            "meet_only_at_canonical_points_within_sets": within_ok,
            "cross_tangencies_per_curve": tangent_counts,
        }),
    )
}

fn surface_models(ctx: &Context) -> Outcome {
    let mi = ctx.model(SurfaceKind::MI)?;
    let vii = ctx.model(SurfaceKind::VII)?;
    let mii = ctx.model(SurfaceKind::MII)?;

    let mi_types = canonical_types(mi);
    let (mi_struct_ok, mi_struct) = mi_structure(mi);
    let mi_ok = mi.curves().len() == 30 && mi.extras().len() == 10 && mi_types == BTreeMap::from([("A1".to_string(), 12)]) && mi_struct_ok;

    let vii_ok = vii.curves().len() == 20 && vii.extras().len() == 0;

    let mii_types = canonical_types(mii);
    let extras = mii.extras();
    let mut pattern = BTreeMap::new();
    for &r in &extras {
        let ones = extras.iter().filter(|&&s| s != r && mii.gram[r][s] == 1).count();
        let twos = extras.iter().filter(|&&s| s != r && mii.gram[r][s] == 2).count();
        *pattern.entry(format!("{ones}x1/{twos}x2")).or_insert(0) += 1;
    }
    let pattern_ok = pattern.len() == 1 && pattern.contains_key("7x1/4x2");
    let mii_ok = mii.curves().len() == 28
        && extras.len() == 12
        && mii_types == BTreeMap::from([("A1".to_string(), 8), ("D4".to_string(), 1)])
        && pattern_ok;
    Ok((
        mi_ok && vii_ok && mii_ok,
        json!({
            "MI": { "ok": mi_ok, "curves": mi.curves().len(), "extras": mi.extras().len(), "canonical": mi_types, "structure": mi_struct },
            "VII": { "ok": vii_ok, "curves": vii.curves().len(), "extras": vii.extras().len() },
            "MII": {
                "ok": mii_ok,
                "curves": mii.curves().len(),
                "extras": extras.len(),
                "canonical": mii_types,
                "extra_pattern": pattern,
                "expected_pattern": "7x1/4x2",
            },
        }),
    ))
}

fn mi_choice(ctx: &Context) -> Outcome {
    let r = qchecks::mi_choice_independence(ctx.ns()).map_err(|e| e.to_string())?;
    Ok((r.all_isomorphic(), json!(r)))
}

fn mi_cross_validation(ctx: &Context) -> Outcome {
    let r = qchecks::mi_torsion_cross_validation(ctx.ns()).map_err(|e| e.to_string())?;
    Ok((r.passed(), json!(r)))
}

fn vii_uniqueness(_: &Context) -> Outcome {
    let r = qchecks::torsion_uniqueness(&[Kodaira::I(10), Kodaira::I(10), Kodaira::I(2), Kodaira::I(2)], &[10]).map_err(|e| e.to_string())?;
    Ok((r.unique(), json!(r)))
}

fn mii_line_choice(ctx: &Context) -> Outcome {
    let flag = MIIFlag::default_for(ctx.plane(), 0);
    let c = mii_f_candidates(ctx.plane(), &flag);
    Ok((c.len() == 2, json!({ "candidates": c })))
}

/// Ranks of all inclusion-maximal families of disjoint, mutually
/// orthogonal connected parabolics.
fn maximal_family_ranks(g: &WeightedGraph, ps: &[Parabolic]) -> BTreeMap<usize, usize> {
    let gram = g.gram();
    let n = gram.len();
    let masks: Vec<u128> = ps.iter().map(|p| p.vertices.iter().fold(0, |a, &v| a | 1u128 << v)).collect();
    let closed: Vec<u128> = ps
        .iter()
        .zip(&masks)
        .map(|(p, &m)| p.vertices.iter().fold(m, |a, &v| (0..n).filter(|&u| gram[v][u] != 0).fold(a, |b, u| b | 1u128 << u)))
        .collect();
    let mut out = BTreeMap::new();
    fn go(start: usize, forbidden: u128, rank: usize, ps: &[Parabolic], masks: &[u128], closed: &[u128], out: &mut BTreeMap<usize, usize>) {
        if !masks.iter().any(|&m| m & forbidden == 0) {
            *out.entry(rank).or_insert(0) += 1;
        }
        for k in start..ps.len() {
            if masks[k] & forbidden == 0 {
                go(k + 1, forbidden | closed[k], rank + ps[k].ty.rank, ps, masks, closed, out);
            }
        }
    }
    go(0, 0, 0, ps, &masks, &closed, &mut out);
    out
}

/// For each A5+A2+A1 decomposition, how many of the A2 vertices are
/// non-effective.
fn a5a2a1_flavors(g: &WeightedGraph, v: &VinbergReport) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for d in v.decompositions.iter().filter(|d| d.type_string() == "~A5+~A2+~A1") {
        for c in d.components.iter().filter(|c| c.ty.to_string() == "~A2") {
            let ne = c.vertices.iter().filter(|&&x| !g.effective[x]).count();
            let key = match ne {
                0 => "A2 effective".to_string(),
                3 => "A2 non-effective".to_string(),
                k => format!("A2 mixed ({k} non-effective)"),
            };
            *m.entry(key).or_insert(0) += 1;
        }
    }
    m
}

fn vinberg_all(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut w = BTreeMap::new();
    for kind in KINDS {
        let model = ctx.model(kind)?;
        let g = model.graph();
        let v = ctx.vinberg(kind)?;
        let ps = enumerate_parabolics(&g).map_err(|e| e.to_string())?;
        let ranks = maximal_family_ranks(&g, &ps);
        let types: BTreeMap<String, usize> = enriques_core::dynkin::type_multisets(&v.decompositions).into_iter().map(|(k, (c, _))| (k, c)).collect();
        let mut kind_ok = v.verdict && v.max_rank == 8 && ranks.keys().all(|&r| r == 8);
        let mut entry = json!({
            "verdict": v.verdict,
            "max_rank": v.max_rank,
            "parabolics": v.parabolic_count,
            "maximal_family_ranks": ranks,
            "type_multisets": types,
        });
        if kind == SurfaceKind::MII {
            let expected: BTreeSet<&str> = ["~A3+~A3+~A1+~A1", "~A5+~A2+~A1", "~A7+~A1", "~A2+~A2+~A2+~A2"].into();
            let found: BTreeSet<&str> = types.keys().map(|s| s.as_str()).collect();
            let flavors = a5a2a1_flavors(&g, v);
            let flavors_ok = flavors.len() == 2 && flavors.contains_key("A2 effective") && flavors.contains_key("A2 non-effective");
            kind_ok &= found == expected && flavors_ok;
            entry["a5a2a1_flavors"] = json!(flavors);
        }
        ok &= kind_ok;
        entry["ok"] = json!(kind_ok);
        w.insert(kind.to_string(), entry);
    }
    Ok((ok, json!(w)))
}

fn normalize_types(s: &str) -> Result<String, String> {
    let mut v: Vec<KodairaFiber> = s.split(',').map(|x| x.trim().parse::<KodairaFiber>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    v.sort();
    Ok(fiber_list(&v))
}

const EXPECTED_FIBRATIONS: [(SurfaceKind, &[&str]); 3] = [
    (SurfaceKind::MI, &["I5,I5,I1,I1", "I6,2IV,I2", "I4,I4,2III", "I3,I3,I3,I3"]),
    (SurfaceKind::VII, &["I5,I5,I1,I1", "I6,2IV,I2", "I9,I1,I1,I1", "I8,2III"]),
    (SurfaceKind::MII, &["I4,I4,III", "I6,IV,I2", "I8,III", "I6,2III", "2IV,2IV,IV"]),
];

fn fibration_lists(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut w = BTreeMap::new();
    for (kind, expected) in EXPECTED_FIBRATIONS {
        let fibs = ctx.fibrations(kind)?;
        let mut found: BTreeMap<String, usize> = BTreeMap::new();
        for f in fibs {
            *found.entry(f.type_string()).or_insert(0) += 1;
        }
        let expected: BTreeSet<String> = expected.iter().map(|s| normalize_types(s)).collect::<Result<_, _>>()?;
        let catalog = fibs.iter().all(|f| f.catalog_match);
        let kind_ok = found.keys().cloned().collect::<BTreeSet<_>>() == expected && catalog;
        ok &= kind_ok;
        w.insert(kind.to_string(), json!({ "ok": kind_ok, "found": found, "expected": expected, "catalog_images": catalog }));
    }
    Ok((ok, json!(w)))
}

/// Expected profiles per fibration type: each profile lists `fiber:how` for
/// every singular fiber.
const EXPECTED_PROFILES: [(SurfaceKind, &[(&str, &[&str])]); 3] = [
    (
        SurfaceKind::MI,
        &[
            ("I5,I5,I1,I1", &["I5:singular I1:singular I5:tangent I1:tangent"]),
            ("I6,2IV,I2", &["I2:singular I6:tangent 2IV:canonical"]),
            ("I4,I4,2III", &["I4:singular I4:tangent 2III:canonical"]),
            ("I3,I3,I3,I3", &["I3:singular I3:singular I3:tangent I3:tangent"]),
        ],
    ),
    (
        SurfaceKind::VII,
        &[
            ("I5,I5,I1,I1", &["I5:singular I5:singular I1:tangent I1:tangent", "I1:singular I1:singular I5:tangent I5:tangent"]),
            ("I6,2IV,I2", &["I6:singular I2:tangent 2IV:canonical"]),
            ("I9,I1,I1,I1", &["I9:singular I1:singular I1:tangent I1:tangent", "I1:singular I1:singular I9:tangent I1:tangent"]),
            ("I8,2III", &["I8:singular 2III:canonical"]),
        ],
    ),
    (
        SurfaceKind::MII,
        &[
            ("I4,I4,III", &["III:singular I4:tangent I4:tangent", "I4:singular I4:singular III:tangent"]),
            ("I6,IV,I2", &["I6:singular I2:singular IV:tangent"]),
            ("I8,III", &["III:singular I8:tangent"]),
            ("I6,2III", &["2III:canonical I6:tangent", "2III:canonical I6:singular"]),
            ("2IV,2IV,IV", &["2IV:canonical 2IV:canonical IV:tangent"]),
        ],
    ),
];

fn normalize_profile(s: &str) -> String {
    let mut v: Vec<&str> = s.split_whitespace().collect();
    v.sort();
    v.join(" ")
}

fn profile_string(summary: &[(String, Vec<&str>)]) -> String {
    let v: Vec<String> = summary.iter().map(|(f, t)| format!("{f}:{}", t.join("+"))).collect();
    normalize_profile(&v.join(" "))
}

fn d4_point(model: &XModel) -> Option<usize> {
    model.canonical_points().into_iter().find(|&p| matches!(model.point_type(p), PointType::Canonical(t) if t == "D4"))
}

fn fiber_named<'a>(fib: &'a XFibration, name: &str) -> Vec<(usize, &'a XFiber)> {
    fib.fibers.iter().enumerate().filter(|(_, f)| f.kind.to_string() == name).collect()
}

/// One point where all three components meet, plus one simple canonical
/// point on each component.
fn multiple_iv_ok(model: &XModel, f: &XFiber) -> bool {
    let cps = &f.canonical_points;
    let simple: Vec<usize> = cps.iter().filter(|p| p.1 == 1).map(|p| p.0).collect();
    cps.len() == 4
        && cps.iter().filter(|p| p.1 == 3).count() == 1
        && simple.len() == 3
        && f.components.iter().all(|&c| simple.iter().filter(|&&q| model.points_on(c).contains(&q)).count() == 1)
}

/// Simple canonical points on each component of a multiple III.
fn multiple_iii_points(model: &XModel, f: &XFiber) -> Option<Vec<Vec<usize>>> {
    if f.canonical_points.iter().any(|p| p.1 != 1) {
        return None;
    }
    Some(
        f.components
            .iter()
            .map(|&c| f.canonical_points.iter().map(|p| p.0).filter(|q| model.points_on(c).contains(q)).collect())
            .collect(),
    )
}

fn has_singular(f: &XFiber, p: usize) -> bool {
    f.canonical_points.iter().any(|x| x.0 == p && x.1 >= 2)
}

/// Canonical-point structure of the fibers named in the bisection statements.
fn fiber_facts(kind: SurfaceKind, model: &XModel, fib: &XFibration) -> Vec<String> {
    let mut bad = Vec::new();
    let ty = fib.type_string();
    for (_, f) in fiber_named(fib, "2IV") {
        if !multiple_iv_ok(model, f) {
            bad.push(format!("{ty}: 2IV canonical points {:?}", f.canonical_points));
        }
    }
    let p0 = d4_point(model);
    for (_, f) in fiber_named(fib, "2III") {
        let pts = multiple_iii_points(model, f);
        let ok = match (kind, p0, &pts) {
            (SurfaceKind::MII, Some(p0), Some(pts)) => {
                pts.len() == 2 && pts.iter().any(|c| c == &[p0]) && pts.iter().any(|c| c.len() == 2 && !c.contains(&p0))
            }
            (SurfaceKind::MII, _, _) => false,
            (_, _, Some(pts)) => f.canonical_points.len() == 4 && pts.iter().all(|c| c.len() == 2),
            _ => false,
        };
        if !ok {
            bad.push(format!("{ty}: 2III canonical points {:?}", f.canonical_points));
        }
    }
    if kind == SurfaceKind::MII {
        let Some(p0) = p0 else {
            bad.push("no D4 point".into());
            return bad;
        };
        let host = match ty.as_str() {
            "(I4,I4,III)" | "(I8,III)" => Some("III"),
            "(I2,I6,IV)" | "(IV,2IV,2IV)" => Some("IV"),
            _ => None,
        };
        if let Some(h) = host {
            if !fiber_named(fib, h).iter().any(|(_, f)| has_singular(f, p0)) {
                bad.push(format!("{ty}: p0 is not the singular point of {h}"));
            }
        }
    }
    bad
}

/// Where a MII bisection meets `p0`, per the statements naming it.
fn p0_bisection_facts(model: &XModel, fib: &XFibration, hits: &[Vec<HitKind>]) -> Option<String> {
    let p0 = d4_point(model)?;
    let ty = fib.type_string();
    let hit = |name: &str| -> Vec<HitKind> { fiber_named(fib, name).iter().flat_map(|(i, _)| hits[*i].clone()).collect() };
    let ok = match ty.as_str() {
        "(I4,I4,III)" => hit("III").iter().all(|h| !matches!(h, HitKind::SingularPoint(_)) || *h == HitKind::SingularPoint(p0)),
        "(I8,III)" => hit("III") == [HitKind::SingularPoint(p0)],
        "(I6,2III)" => {
            let tangent = hit("I6").iter().any(|h| matches!(h, HitKind::Tangent(_)));
            match hit("2III").as_slice() {
                [HitKind::SimpleCanonical(q)] => (*q == p0) == tangent,
                _ => false,
            }
        }
        _ => true,
    };
    (!ok).then(|| format!("{ty}: p0 placement {hits:?}"))
}

fn bisection_lemmas(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut w = BTreeMap::new();
    for (kind, table) in EXPECTED_PROFILES {
        let model = ctx.model(kind)?;
        let fibs = ctx.fibrations(kind)?;
        let mut expected: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (t, ps) in table {
            expected.insert(normalize_types(t)?, ps.iter().map(|p| normalize_profile(p)).collect());
        }
        let mut seen: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut bad: Vec<String> = Vec::new();
        let mut bisections = 0usize;
        for fib in fibs {
            let ty = fib.type_string();
            let profiles = bisection_profiles(model, fib).map_err(|e| e.to_string())?;
            bisections += profiles.len();
            bad.extend(fiber_facts(kind, model, fib));
            for p in &profiles {
                let s = profile_string(&p.summary(fib));
                if !expected.get(&ty).is_some_and(|e| e.contains(&s)) {
                    bad.push(format!("{ty}: unexpected profile {s}"));
                }
                if kind == SurfaceKind::MII {
                    bad.extend(p0_bisection_facts(model, fib, &p.hits));
                }
                seen.entry(ty.clone()).or_default().insert(s);
            }
        }
        for (ty, e) in &expected {
            let s = seen.get(ty).cloned().unwrap_or_default();
            for missing in e.difference(&s) {
                bad.push(format!("{ty}: profile never occurs: {missing}"));
            }
        }
        bad.sort();
        bad.dedup();
        let kind_ok = bad.is_empty();
        ok &= kind_ok;
        w.insert(
            kind.to_string(),
            json!({ "ok": kind_ok, "fibrations": fibs.len(), "bisections": bisections, "profiles": seen, "failures": first(&bad, 10) }),
        );
    }
    Ok((ok, json!(w)))
}

fn singularity_lattice(model: &XModel) -> RdpMultiset {
    let mut m = RdpMultiset::new();
    for (t, c) in canonical_types(model) {
        let r = match t.as_str() {
            "A1" => Rdp::A1,
            "E7" => Rdp::E7,
            "E8" => Rdp::E8,
            d => Rdp::D(d.trim_start_matches('D').parse().unwrap_or(0)),
        };
        *m.entry(r).or_insert(0) += c as u32;
    }
    m
}

fn fiber_types_admissible(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut w = BTreeMap::new();
    for kind in KINDS {
        let model = ctx.model(kind)?;
        let lat = singularity_lattice(model);
        let allowed = sorted_types(&admissible_types(&lat, true));
        let mut outside = BTreeSet::new();
        for f in ctx.fibrations(kind)? {
            let plain: Vec<Kodaira> = f.fibers.iter().map(|x| x.kind.kind).collect();
            if !allowed.contains(sorted_types(&[plain]).iter().next().expect("one entry")) {
                outside.insert(f.type_string());
            }
        }
        ok &= outside.is_empty();
        let allowed_s = allowed;
        w.insert(kind.to_string(), json!({ "lattice": rdp_string(&lat), "admissible": allowed_s, "not_admitted": outside }));
    }
    Ok((ok, json!(w)))
}

fn catalog_audit(_: &Context) -> Outcome {
    let expected_torsion: [Option<u64>; 8] = [Some(18), Some(8), Some(10), None, Some(6), None, Some(4), Some(6)];
    let mut ok = true;
    let mut entries = Vec::new();
    for ((fibers, r), want) in y_catalog_audit().into_iter().zip(expected_torsion) {
        let name = fiber_list(&fibers.iter().map(|&k| KodairaFiber::new(k)).collect::<Vec<_>>());
        match r {
            Ok(a) => {
                let torsion_ok = match want {
                    Some(t) => a.mw_rank == Some(0) && a.torsion_order_candidates == [t],
                    None => a.torsion_order_candidates.is_empty(),
                };
                ok &= torsion_ok;
                entries.push(json!({
                    "fibers": name,
                    "euler_sum": a.euler_sum,
                    "wild_deficiency": a.wild_deficiency,
                    "mw_rank": a.mw_rank,
                    "torsion": a.torsion_order_candidates,
                    "expected_torsion": want,
                    "ok": torsion_ok,
                }));
            }
            Err(e) => {
                ok = false;
                entries.push(json!({ "fibers": name, "error": e.to_string() }));
            }
        }
    }
    let mut sections = BTreeMap::new();
    for (name, fibers, torsion, want) in [
        ("(I6,I6,I6,I6)", vec![Kodaira::I(6); 4], vec![6, 3], 18usize),
        ("(I10,I10,I2,I2)", vec![Kodaira::I(10), Kodaira::I(10), Kodaira::I(2), Kodaira::I(2)], vec![10], 10),
    ] {
        let got = torsion_section_model(&fibers, &torsion).map_err(|e| e.to_string())?.sections().len();
        ok &= got == want;
        sections.insert(name, json!({ "sections": got, "expected": want }));
    }
    Ok((ok, json!({ "catalog": entries, "sections": sections })))
}

fn ehs_candidates(_: &Context) -> Outcome {
    let got: BTreeSet<RdpMultiset> = ehs_root_candidates().into_iter().map(|c| c.parts).collect();
    let want: BTreeSet<RdpMultiset> = [
        vec![(Rdp::A1, 12)],
        vec![(Rdp::A1, 8), (Rdp::D(4), 1)],
        vec![(Rdp::A1, 6), (Rdp::D(6), 1)],
        vec![(Rdp::A1, 4), (Rdp::D(4), 2)],
    ]
    .into_iter()
    .map(|v| v.into_iter().collect())
    .collect();
    let names: Vec<String> = got.iter().map(rdp_string).collect();
    Ok((got == want, json!({ "candidates": names })))
}

fn sorted_types(types: &[Vec<Kodaira>]) -> BTreeSet<String> {
    types
        .iter()
        .map(|t| {
            let mut v: Vec<KodairaFiber> = t.iter().map(|&k| KodairaFiber::new(k)).collect();
            v.sort();
            fiber_list(&v)
        })
        .collect()
}

/// Per candidate lattice, the admitted Enriques fiber types; `A1^12` is
/// restricted to fibrations with a special bisection.
fn possible_fiber_types(_: &Context) -> Outcome {
    let expected: [(Vec<(Rdp, u32)>, bool, &[&str]); 4] = [
        (
            vec![(Rdp::A1, 12)],
            true,
            &["I3,I3,I3,I3", "I4,I4,III", "I5,I5,I1,I1", "I6,I2,IV", "I8,III", "I9,I1,I1,I1"],
        ),
        (vec![(Rdp::A1, 8), (Rdp::D(4), 1)], false, &["I4,I4,III", "I6,III", "I6,I2,IV", "IV,IV,IV", "I8,III"]),
        (vec![(Rdp::A1, 6), (Rdp::D(6), 1)], false, &["I6,III"]),
        (vec![(Rdp::A1, 4), (Rdp::D(4), 2)], false, &["IV,IV,IV"]),
    ];
    let mut ok = true;
    let mut w = BTreeMap::new();
    for (parts, special, want) in expected {
        let lat: RdpMultiset = parts.into_iter().collect();
        let got = sorted_types(&admissible_types(&lat, special));
        let want: BTreeSet<String> = want.iter().map(|s| normalize_types(s)).collect::<Result<_, _>>()?;
        ok &= got == want;
        w.insert(rdp_string(&lat), json!({ "special_only": special, "admitted": got, "expected": want }));
    }
    Ok((ok, json!(w)))
}

fn rs_identity(_: &Context) -> Outcome {
    let (c2, deg, kd, d2) = (24, 0, 0, -24);
    Ok((rs_identity_check(c2, deg, kd, d2), json!({ "c2": c2, "deg": deg, "K.D": kd, "D^2": d2 })))
}

fn mii_automorphisms(ctx: &Context) -> Outcome {
    let g = ctx.model(SurfaceKind::MII)?.graph();
    let (flagged, gens) = automorphism_count(&g, true);
    let (unflagged, _) = automorphism_count(&g, false);
    let curves_only = {
        let keep: Vec<usize> = (0..g.len()).filter(|&i| g.effective[i]).collect();
        let m: Vec<Vec<i64>> = keep.iter().map(|&i| keep.iter().map(|&j| g.m[i][j]).collect()).collect();
        let sub = WeightedGraph::new(keep.iter().map(|&i| g.labels[i].clone()).collect(), vec![true; keep.len()], m).map_err(|e| e.to_string())?;
        automorphism_count(&sub, false).0
    };
    Ok((
        flagged == 1152,
        json!({
            "order_with_flags": flagged.to_string(),
            "order_without_flags": unflagged.to_string(),
            "order_on_curves": curves_only.to_string(),
            "generators": gens.len(),
            "expected": 1152,
        }),
    ))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<BigInt>> {
    let mut u: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..4) {
            0 if i != j => {
                for row in u.iter_mut() {
                    row.swap(i, j);
                }
            }
            1 => {
                for row in u.iter_mut() {
                    row[i] = -row[i].clone();
                }
            }
            _ if i != j => {
                let k = BigInt::from(rng.gen_range(-2i64..=2));
                for row in u.iter_mut() {
                    let add = &k * &row[i];
                    row[j] += add;
                }
            }
            _ => {}
        }
    }
    u
}

fn conjugate(g: &[Vec<BigInt>], u: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = g.len();
    let gu: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &g[i][k] * &u[k][j]).sum()).collect()).collect();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &u[k][i] * &gu[k][j]).sum()).collect()).collect()
}

fn property_suites(ctx: &Context) -> Outcome {
    let ns = ctx.ns();
    let lat = ns.lattice();
    let dim = lat.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2c3a_9e17);
    let roots: Vec<LatticeVector> = (0..GENERATORS)
        .map(|i| ns.vector(&ns.generator(i)))
        .chain(hyperovals(ctx.plane()).iter().map(|h| ns.vector(&ns.hyperoval_class(h))))
        .collect();
    let e = |x: exactlat::LatticeError| x.to_string();
    let mut reflection_failures = Vec::new();
    const REFLECTION_CASES: usize = 10_000;
    for case in 0..REFLECTION_CASES {
        let x = LatticeVector::from_i64(&(0..dim).map(|_| rng.gen_range(-5..=5)).collect::<Vec<i64>>());
        let y = LatticeVector::from_i64(&(0..dim).map(|_| rng.gen_range(-5..=5)).collect::<Vec<i64>>());
        let d = &roots[rng.gen_range(0..roots.len())];
        let sx = exactlat::reflect(&x, d, lat).map_err(e)?;
        let sy = exactlat::reflect(&y, d, lat).map_err(e)?;
        let ssx = exactlat::reflect(&sx, d, lat).map_err(e)?;
        if ssx != x || lat.pairing(&sx, &sy).map_err(e)? != lat.pairing(&x, &y).map_err(e)? {
            reflection_failures.push(case);
        }
    }
    const CONJUGATION_CASES: usize = 100;
    let g = lat.gram();
    let sig = signature(g);
    let det = abs_det(g);
    let mut conjugation_failures = Vec::new();
    for case in 0..CONJUGATION_CASES {
        let u = random_unimodular(&mut rng, dim);
        let h = conjugate(g, &u);
        if signature(&h) != sig || abs_det(&h) != det {
            conjugation_failures.push(case);
        }
    }
    let mut ledger_pairs = 0usize;
    let mut ledger_failures = Vec::new();
    for kind in KINDS {
        let m = ctx.model(kind)?;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                ledger_pairs += 1;
                let s: i64 = m.contributions(i, j).iter().map(|c| c.multiplicity).sum();
                if s != m.gram[i][j] {
                    ledger_failures.push(format!("{kind}: {} . {}", m.classes[i].label, m.classes[j].label));
                }
            }
        }
    }
    let choice = qchecks::mi_choice_independence(ns).map_err(|e| e.to_string())?;
    let ok = reflection_failures.is_empty() && conjugation_failures.is_empty() && ledger_failures.is_empty() && choice.all_isomorphic();
    Ok((
        ok,
        json!({
            "reflection": { "cases": REFLECTION_CASES, "failures": first(&reflection_failures, 5) },
            "conjugation": { "cases": CONJUGATION_CASES, "failures": first(&conjugation_failures, 5) },
            "ledger": { "pairs": ledger_pairs, "failures": first(&ledger_failures, 5) },
            "mi_choice": { "assignments": choice.assignments, "all_isomorphic": choice.all_isomorphic() },
        }),
    ))
}
