//! Kodaira fiber arithmetic: Euler budgets, Shioda–Tate audits, fiber
//! descent under the inseparable quotient, and root-lattice candidates for
//! the singularities of the canonical cover.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kodaira {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of components.
    pub fn components(self) -> u32 {
        match self {
            Kodaira::I(n) => n,
            Kodaira::IStar(n) => n + 5,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }

    /// Order of the component group (discriminant of the non-identity components).
    pub fn discriminant(self) -> u32 {
        match self {
            Kodaira::I(n) => n,
            Kodaira::IStar(_) => 4,
            Kodaira::II | Kodaira::IIStar => 1,
            Kodaira::III | Kodaira::IIIStar => 2,
            Kodaira::IV | Kodaira::IVStar => 3,
        }
    }

    /// Euler number of the fiber without wild contribution.
    pub fn euler(self) -> u32 {
        match self {
            Kodaira::I(n) => n,
            Kodaira::IStar(n) => n + 6,
            Kodaira::II => 2,
            Kodaira::III => 3,
            Kodaira::IV => 4,
            Kodaira::IVStar => 8,
            Kodaira::IIIStar => 9,
            Kodaira::IIStar => 10,
        }
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, Kodaira::I(_))
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FibError {
    #[error("unrecognized fiber symbol `{0}`")]
    Symbol(String),
    #[error("unrecognized ambient `{0}`")]
    Ambient(String),
    #[error("fiber Euler numbers sum to {euler}, exceeding c2 = {c2}")]
    EulerExceeded { euler: u32, c2: u32 },
    #[error("multiplicative fibers alone must fill the Euler budget exactly (sum {euler}, c2 {c2})")]
    MultiplicativeSlack { euler: u32, c2: u32 },
    #[error("trivial lattice of rank {0} exceeds the Picard number")]
    RankExceeded(u32),
    #[error("Mordell–Weil rank 0 but product of discriminants {0} is not 4 times a square")]
    NoTorsion(u64),
    #[error("only multiple fibers on Enriques surfaces are supported")]
    MultipleOnK3,
    #[error("fiber {0} does not occur in the K3 catalog")]
    Unsupported(Kodaira),
}

impl FromStr for Kodaira {
    type Err = FibError;
    fn from_str(s: &str) -> Result<Self, FibError> {
        let bad = || FibError::Symbol(s.to_string());
        let t = s.trim();
        Ok(match t {
            "II" => Kodaira::II,
            "III" => Kodaira::III,
            "IV" => Kodaira::IV,
            "IV*" => Kodaira::IVStar,
            "III*" => Kodaira::IIIStar,
            "II*" => Kodaira::IIStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(bad)?;
                match rest.strip_suffix('*') {
                    Some(n) => Kodaira::IStar(n.parse().map_err(|_| bad())?),
                    None => {
                        let n: u32 = rest.parse().map_err(|_| bad())?;
                        if n == 0 {
                            return Err(bad());
                        }
                        Kodaira::I(n)
                    }
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KodairaFiber {
    pub kind: Kodaira,
    pub multiple: bool,
}

impl KodairaFiber {
    pub fn new(kind: Kodaira) -> Self {
        KodairaFiber { kind, multiple: false }
    }

    pub fn multiple(kind: Kodaira) -> Self {
        KodairaFiber { kind, multiple: true }
    }
}

impl fmt::Display for KodairaFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiple {
            write!(f, "2{}", self.kind)
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

impl FromStr for KodairaFiber {
    type Err = FibError;
    fn from_str(s: &str) -> Result<Self, FibError> {
        let t = s.trim();
        match t.strip_prefix('2') {
            Some(rest) => Ok(KodairaFiber::multiple(rest.parse()?)),
            None => Ok(KodairaFiber::new(t.parse()?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    K3,
    EnriquesClassical,
    EnriquesSingular,
    EnriquesSupersingular,
}

impl Ambient {
    pub fn c2(self) -> u32 {
        match self {
            Ambient::K3 => 24,
            _ => 12,
        }
    }

    pub fn picard(self) -> u32 {
        match self {
            Ambient::K3 => 22,
            _ => 10,
        }
    }
}

impl FromStr for Ambient {
    type Err = FibError;
    fn from_str(s: &str) -> Result<Self, FibError> {
        match s.to_ascii_lowercase().as_str() {
            "k3" => Ok(Ambient::K3),
            "enriques" | "enriques-classical" | "classical" => Ok(Ambient::EnriquesClassical),
            "enriques-singular" | "singular" => Ok(Ambient::EnriquesSingular),
            "enriques-supersingular" | "supersingular" => Ok(Ambient::EnriquesSupersingular),
            _ => Err(FibError::Ambient(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationConfig {
    pub fibers: Vec<KodairaFiber>,
    pub ambient: Ambient,
}

impl FibrationConfig {
    pub fn parse(fibers: &str, ambient: Ambient) -> Result<Self, FibError> {
        let fibers = fibers
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FibrationConfig { fibers, ambient })
    }

    pub fn k3(kinds: &[Kodaira]) -> Self {
        FibrationConfig {
            fibers: kinds.iter().map(|&k| KodairaFiber::new(k)).collect(),
            ambient: Ambient::K3,
        }
    }
}

pub fn fiber_list(fibers: &[KodairaFiber]) -> String {
    format!("({})", fibers.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub euler_sum: u32,
    pub wild_deficiency: u32,
    pub trivial_rank: u32,
    pub mw_rank: Option<u32>,
    pub torsion_order_candidates: Vec<u64>,
}

pub fn audit_fibration(config: &FibrationConfig) -> Result<AuditReport, FibError> {
    let c2 = config.ambient.c2();
    if config.ambient == Ambient::K3 && config.fibers.iter().any(|f| f.multiple) {
        return Err(FibError::MultipleOnK3);
    }
    let euler_sum: u32 = config.fibers.iter().map(|f| f.kind.euler()).sum();
    if euler_sum > c2 {
        return Err(FibError::EulerExceeded { euler: euler_sum, c2 });
    }
    if euler_sum < c2 && config.fibers.iter().all(|f| f.kind.is_multiplicative()) {
        return Err(FibError::MultiplicativeSlack { euler: euler_sum, c2 });
    }
    let trivial_rank = 2 + config.fibers.iter().map(|f| f.kind.components() - 1).sum::<u32>();
    if trivial_rank > config.ambient.picard() {
        return Err(FibError::RankExceeded(trivial_rank));
    }
    let (mw_rank, torsion_order_candidates) = match config.ambient {
        Ambient::K3 => {
            let r = config.ambient.picard() - trivial_rank;
            let mut cands = Vec::new();
            if r == 0 {
                let prod: u64 = config.fibers.iter().map(|f| u64::from(f.kind.discriminant())).product();
                match (prod % 4 == 0).then(|| exact_sqrt(prod / 4)).flatten() {
                    Some(t) => cands.push(t),
                    None => return Err(FibError::NoTorsion(prod)),
                }
            }
            (Some(r), cands)
        }
        _ => (None, Vec::new()),
    };
    Ok(AuditReport {
        euler_sum,
        wild_deficiency: c2 - euler_sum,
        trivial_rank,
        mw_rank,
        torsion_order_candidates,
    })
}

fn exact_sqrt(x: u64) -> Option<u64> {
    let r = (x as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&t| t * t == x)
}

/// The eight elliptic fibrations of the K3 surface, in catalog order.
pub fn y_catalog() -> Vec<Vec<Kodaira>> {
    use Kodaira::*;
    vec![
        vec![I(6), I(6), I(6), I(6)],
        vec![I(8), I(8), IStar(1)],
        vec![I(10), I(10), I(2), I(2)],
        vec![I(12), IStar(3)],
        vec![I(12), I(4), IVStar],
        vec![IVStar, IVStar, IVStar],
        vec![I(16), IStar(1)],
        vec![I(18), I(2), I(2), I(2)],
    ]
}

pub fn y_catalog_audit() -> Vec<(Vec<Kodaira>, Result<AuditReport, FibError>)> {
    y_catalog()
        .into_iter()
        .map(|c| {
            let r = audit_fibration(&FibrationConfig::k3(&c));
            (c, r)
        })
        .collect()
}

/// Rational double point types that can occur on the canonical cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rdp {
    A1,
    D(u32),
    E7,
    E8,
}

impl Rdp {
    pub fn rank(self) -> u32 {
        match self {
            Rdp::A1 => 1,
            Rdp::D(n) => n,
            Rdp::E7 => 7,
            Rdp::E8 => 8,
        }
    }

    /// Length of the 2-elementary discriminant group.
    pub fn a(self) -> u32 {
        match self {
            Rdp::A1 | Rdp::E7 => 1,
            Rdp::D(_) => 2,
            Rdp::E8 => 0,
        }
    }
}

impl fmt::Display for Rdp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rdp::A1 => f.write_str("A1"),
            Rdp::D(n) => write!(f, "D{n}"),
            Rdp::E7 => f.write_str("E7"),
            Rdp::E8 => f.write_str("E8"),
        }
    }
}

/// Multiset of RDP types, stored as counts.
pub type RdpMultiset = BTreeMap<Rdp, u32>;

pub fn rdp_string(m: &RdpMultiset) -> String {
    let parts: Vec<String> = m
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(r, &c)| if c == 1 { r.to_string() } else { format!("{r}^{c}") })
        .collect();
    parts.join("+")
}

fn rdp(items: &[(Rdp, u32)]) -> RdpMultiset {
    items.iter().copied().filter(|&(_, c)| c > 0).collect()
}

/// One way a K3 fiber can meet the integral curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RdpOption {
    pub lattice: RdpMultiset,
    /// Possible numbers of canonical points (with infinitely near points)
    /// that the image of a section picks up on this fiber.
    pub section_hits: Vec<u32>,
}

/// Image fiber on the Enriques side together with the RDP patterns.
pub fn descend_fiber_type(g: Kodaira) -> Result<(Kodaira, Vec<RdpOption>), FibError> {
    let opt = |l: &[(Rdp, u32)], hits: &[u32]| RdpOption {
        lattice: rdp(l),
        section_hits: hits.to_vec(),
    };
    match g {
        Kodaira::I(n) if n % 2 == 0 => Ok((Kodaira::I(n / 2), vec![opt(&[(Rdp::A1, n / 2)], &[0, 1])])),
        Kodaira::IStar(1) => Ok((Kodaira::III, vec![opt(&[(Rdp::A1, 4)], &[1]), opt(&[(Rdp::D(4), 1)], &[0, 2])])),
        Kodaira::IStar(3) => Ok((
            Kodaira::III,
            vec![opt(&[(Rdp::A1, 2), (Rdp::D(4), 1)], &[1, 2]), opt(&[(Rdp::D(6), 1)], &[0, 3])],
        )),
        Kodaira::IVStar => Ok((Kodaira::IV, vec![opt(&[(Rdp::A1, 4)], &[1]), opt(&[(Rdp::D(4), 1)], &[0])])),
        other => Err(FibError::Unsupported(other)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootCandidate {
    pub parts: RdpMultiset,
    pub rank: u32,
    pub a: u32,
}

/// Root lattices of rank 12 built from A1, D_2n, E7, E8 with `a ≥ 8`.
pub fn ehs_root_candidates() -> Vec<RootCandidate> {
    all_rank12_candidates().into_iter().filter(|c| c.a >= 8).collect()
}

pub fn all_rank12_candidates() -> Vec<RootCandidate> {
    let kinds = [Rdp::A1, Rdp::D(4), Rdp::D(6), Rdp::D(8), Rdp::D(10), Rdp::D(12), Rdp::E7, Rdp::E8];
    let mut out = Vec::new();
    fn go(kinds: &[Rdp], i: usize, left: u32, cur: &mut RdpMultiset, out: &mut Vec<RootCandidate>) {
        if left == 0 {
            let a = cur.iter().map(|(r, c)| r.a() * c).sum();
            out.push(RootCandidate {
                parts: cur.clone(),
                rank: 12,
                a,
            });
            return;
        }
        if i == kinds.len() {
            return;
        }
        let r = kinds[i].rank();
        for c in (0..=left / r).rev() {
            if c > 0 {
                cur.insert(kinds[i], c);
            }
            go(kinds, i + 1, left - c * r, cur, out);
            cur.remove(&kinds[i]);
        }
    }
    go(&kinds, 0, 12, &mut BTreeMap::new(), &mut out);
    out
}

/// One RDP placement for a catalog fibration and its Enriques image.
#[derive(Clone, Debug, Serialize)]
pub struct DescentCase {
    pub g: Vec<Kodaira>,
    pub f: Vec<Kodaira>,
    pub lattice: RdpMultiset,
    /// Whether some choice of section components picks up exactly two
    /// canonical points, as a special bisection must.
    pub special_feasible: bool,
}

/// All RDP placements over the catalog whose total lattice is one of the
/// candidates.
pub fn descent_cases() -> Vec<DescentCase> {
    let cands: Vec<RdpMultiset> = ehs_root_candidates().into_iter().map(|c| c.parts).collect();
    let mut out = Vec::new();
    for g in y_catalog() {
        let desc: Vec<(Kodaira, Vec<RdpOption>)> = g.iter().map(|&k| descend_fiber_type(k).expect("catalog fiber")).collect();
        let f: Vec<Kodaira> = desc.iter().map(|d| d.0).collect();
        let combos = desc.iter().fold(vec![Vec::new()], |acc: Vec<Vec<usize>>, d| {
            acc.iter()
                .flat_map(|p| (0..d.1.len()).map(move |k| [p.as_slice(), &[k]].concat()))
                .collect()
        });
        for idx in combos {
            let mut lat = RdpMultiset::new();
            for (d, &k) in desc.iter().zip(&idx) {
                for (r, c) in &d.1[k].lattice {
                    *lat.entry(*r).or_insert(0) += c;
                }
            }
            if !cands.contains(&lat) {
                continue;
            }
            let mut sums = vec![0u32];
            for (d, &k) in desc.iter().zip(&idx) {
                sums = sums.iter().flat_map(|s| d.1[k].section_hits.iter().map(move |h| s + h)).collect();
            }
            out.push(DescentCase {
                g: g.clone(),
                f: f.clone(),
                lattice: lat,
                special_feasible: sums.contains(&2),
            });
        }
    }
    out
}

/// Enriques fiber types (sorted) admitted by a given singularity lattice.
pub fn admissible_types(lattice: &RdpMultiset, special_only: bool) -> Vec<Vec<Kodaira>> {
    let mut v: Vec<Vec<Kodaira>> = descent_cases()
        .into_iter()
        .filter(|c| &c.lattice == lattice && (!special_only || c.special_feasible))
        .map(|c| c.f)
        .collect();
    v.sort();
    v.dedup();
    v
}

/// `c2 = deg⟨D⟩ − K·(D) − (D)²`.
pub fn rs_identity_check(c2: i64, deg_isolated: i64, k_dot_d: i64, d_squared: i64) -> bool {
    c2 == deg_isolated - k_dot_d - d_squared
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_round_trip() {
        for s in ["I1", "I10", "I0*", "I3*", "II", "III", "IV", "IV*", "III*", "II*", "2IV", "2III"] {
            let f: KodairaFiber = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("I0".parse::<Kodaira>().is_err());
        assert!("V".parse::<Kodaira>().is_err());
    }

    #[test]
    fn ehs_filter_rejections() {
        let all = all_rank12_candidates();
        let find = |items: &[(Rdp, u32)]| all.iter().find(|c| c.parts == rdp(items)).unwrap().a;
        assert_eq!(find(&[(Rdp::A1, 5), (Rdp::E7, 1)]), 6);
        assert_eq!(find(&[(Rdp::D(4), 3)]), 6);
    }
}
