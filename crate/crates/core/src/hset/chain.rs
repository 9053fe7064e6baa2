//! Chains of covering relations, closure by the reversing symmetry and the
//! consequences the chains imply: periodic orbits and symbolic dynamics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::covering::{check_covering, CertDirection, CoverSettings, CoveringCertificate, RelationKind};
use super::{HSet, PlanarMap};

/// `from => to` under `P^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub from: String,
    pub to: String,
    pub k: u32,
}

impl Relation {
    pub fn new(from: &str, to: &str, k: u32) -> Self {
        Relation {
            from: from.into(),
            to: to.into(),
            k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("certificate {0} => {1} is not verified; nothing to transport")]
    NotVerified(String, String),
    #[error("certificate refers to {0}, got h-set {1}")]
    Mismatch(String, String),
}

/// From a verified `M => N` under `P^k` (or `M <= N`), the relation
/// `R(N)^T <= R(M)^T` (or `R(N)^T => R(M)^T`) under `P^k`, using
/// `R P R = P^{-1}`: `R(M) => R(N)` under `P^{-k}`, which is the
/// back-covering `R(N)^T <= R(M)^T` under `P^k` by definition. No map is
/// evaluated.
pub fn derive_backcovering_by_symmetry(
    cert: &CoveringCertificate,
    from: &HSet,
    to: &HSet,
) -> Result<(CoveringCertificate, HSet, HSet), SymmetryError> {
    if !cert.verified {
        return Err(SymmetryError::NotVerified(cert.from.clone(), cert.to.clone()));
    }
    if cert.from != from.name {
        return Err(SymmetryError::Mismatch(cert.from.clone(), from.name.clone()));
    }
    if cert.to != to.name {
        return Err(SymmetryError::Mismatch(cert.to.clone(), to.name.clone()));
    }
    let new_from = to.mirror_transpose();
    let new_to = from.mirror_transpose();
    let kind = match cert.kind {
        RelationKind::Covering => RelationKind::BackCovering,
        RelationKind::BackCovering => RelationKind::Covering,
    };
    let derived = CoveringCertificate {
        from: new_from.name.clone(),
        to: new_to.name.clone(),
        kind,
        iterate: cert.iterate,
        direction: CertDirection::SymmetryDerived,
        verified: true,
        subdivision_depth: 0,
        pieces: 0,
        degree: cert.degree,
        left_edge_x: None,
        right_edge_x: None,
        image_hull: None,
        lift: -cert.lift,
        diagnostics: vec![format!(
            "transported from {} {} {} by the reversing symmetry",
            cert.from,
            match cert.kind {
                RelationKind::Covering => "=>",
                RelationKind::BackCovering => "<=",
            },
            cert.to
        )],
        settings: cert.settings.clone(),
        map_calls: 0,
    };
    Ok((derived, new_from, new_to))
}

/// Two disjoint sets `a`, `b` such that for every ordered pair there is a
/// chain of weight exactly `power` from one to the other: `P^power` is
/// semiconjugate to the full shift on two symbols on an invariant subset of
/// `a ∪ b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicDynamics {
    pub symbols: [String; 2],
    pub power: u32,
    pub disjoint: bool,
    /// Witness chains `[from][to]`, as lists of set names.
    pub walks: Vec<Vec<Option<Vec<String>>>>,
    pub holds: bool,
}

/// Existence of a periodic orbit following a closed chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicStatement {
    pub cycle: Vec<String>,
    pub period: u32,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub sets: Vec<HSet>,
    pub certificates: Vec<CoveringCertificate>,
    /// Sets required to satisfy `R(N)^T = N` and whether they do.
    pub symmetric_sets: Vec<(String, bool)>,
    pub symbolic: Option<SymbolicDynamics>,
    pub periodic: Vec<PeriodicStatement>,
    /// Map evaluations made while deriving by symmetry (zero by construction).
    pub symmetry_evaluations: u64,
    pub failures: Vec<String>,
    pub verified: bool,
}

/// Options of [`chain_verify`].
#[derive(Debug, Clone, Default)]
pub struct ChainOptions {
    /// Derive the mirrored back-coverings of all verified relations.
    pub close_by_symmetry: bool,
    /// Sets that must satisfy `R(N)^T = N` exactly.
    pub symmetric: Vec<String>,
    /// `(a, b, power)`: the claimed symbolic dynamics.
    pub claim: Option<(String, String, u32)>,
}

fn arrow(c: &CoveringCertificate) -> &'static str {
    match c.kind {
        RelationKind::Covering => "=>",
        RelationKind::BackCovering => "<=",
    }
}

/// Verifies every relation with [`check_covering`], optionally closes the
/// chain by symmetry and evaluates the claimed consequences.
pub fn chain_verify<M: PlanarMap>(
    sets: &[HSet],
    relations: &[Relation],
    map: &M,
    settings: &CoverSettings,
    opts: &ChainOptions,
) -> ChainReport {
    let mut sets: Vec<HSet> = sets.to_vec();
    let find = |sets: &[HSet], n: &str| sets.iter().position(|s| s.name == n);
    let mut failures = Vec::new();
    for r in relations {
        for n in [&r.from, &r.to] {
            if find(&sets, n).is_none() {
                failures.push(format!("relation refers to unknown set {n}"));
            }
        }
    }
    if !failures.is_empty() {
        return ChainReport {
            sets,
            certificates: Vec::new(),
            symmetric_sets: Vec::new(),
            symbolic: None,
            periodic: Vec::new(),
            symmetry_evaluations: 0,
            failures,
            verified: false,
        };
    }

    let mut certs: Vec<CoveringCertificate> = relations
        .par_iter()
        .map(|r| {
            let m = &sets[find(&sets, &r.from).expect("checked")];
            let n = &sets[find(&sets, &r.to).expect("checked")];
            check_covering(m, n, r.k, map, settings)
        })
        .collect();
    for c in &certs {
        if !c.verified {
            let why = c.diagnostics.first().cloned().unwrap_or_default();
            failures.push(format!("{} {} {} (P^{}): {why}", c.from, arrow(c), c.to, c.iterate));
        }
    }

    let symmetric_sets: Vec<(String, bool)> = opts
        .symmetric
        .iter()
        .map(|n| {
            let ok = find(&sets, n).map(|i| sets[i].is_r_symmetric()).unwrap_or(false);
            (n.clone(), ok)
        })
        .collect();
    for (n, ok) in &symmetric_sets {
        if !ok {
            failures.push(format!("{n} is not symmetric: R({n})^T differs from {n}; closure refused"));
        }
    }

    let evals_before = map.evaluations();
    if opts.close_by_symmetry && symmetric_sets.iter().all(|(_, ok)| *ok) {
        let forward: Vec<CoveringCertificate> = certs.iter().filter(|c| c.verified).cloned().collect();
        for c in forward {
            let m = sets[find(&sets, &c.from).expect("known")].clone();
            let n = sets[find(&sets, &c.to).expect("known")].clone();
            let (mut d, a, b) = derive_backcovering_by_symmetry(&c, &m, &n).expect("verified input");
            d.from = intern(&mut sets, a);
            d.to = intern(&mut sets, b);
            certs.push(d);
        }
    }
    let symmetry_evaluations = map.evaluations() - evals_before;

    let edges: Vec<(usize, usize, u32)> = certs
        .iter()
        .filter(|c| c.verified)
        .map(|c| (find(&sets, &c.from).unwrap(), find(&sets, &c.to).unwrap(), c.iterate))
        .collect();
    let names: Vec<String> = sets.iter().map(|s| s.name.clone()).collect();

    let symbolic = opts.claim.as_ref().map(|(a, b, power)| {
        let ia = find(&sets, a);
        let ib = find(&sets, b);
        let mut walks = vec![vec![None, None], vec![None, None]];
        let mut disjoint = false;
        if let (Some(ia), Some(ib)) = (ia, ib) {
            disjoint = sets[ia].disjoint_from(&sets[ib], map.theta_period());
            for (x, &from) in [ia, ib].iter().enumerate() {
                for (y, &to) in [ia, ib].iter().enumerate() {
                    walks[x][y] = walk(&edges, names.len(), from, to, *power)
                        .map(|w| w.into_iter().map(|i| names[i].clone()).collect());
                }
            }
        }
        let holds = disjoint && walks.iter().flatten().all(Option::is_some);
        SymbolicDynamics {
            symbols: [a.clone(), b.clone()],
            power: *power,
            disjoint,
            walks,
            holds,
        }
    });
    if let Some(s) = &symbolic {
        if !s.disjoint {
            failures.push(format!("{} and {} are not proven disjoint", s.symbols[0], s.symbols[1]));
        }
        for x in 0..2 {
            for y in 0..2 {
                if s.walks[x][y].is_none() {
                    failures.push(format!(
                        "no chain of weight {} from {} to {}",
                        s.power, s.symbols[x], s.symbols[y]
                    ));
                }
            }
        }
    }

    let periodic = simple_cycles(&edges, names.len(), 64)
        .into_iter()
        .map(|(cycle, period)| {
            let path: Vec<String> = cycle.iter().map(|&i| names[i].clone()).collect();
            let statement = format!(
                "there is x in {} with P^{period}(x) = x (theta mod pi) whose orbit visits {}",
                path[0],
                path.iter().chain(std::iter::once(&path[0])).cloned().collect::<Vec<_>>().join(" -> ")
            );
            PeriodicStatement {
                cycle: path,
                period,
                statement,
            }
        })
        .collect();

    let verified = failures.is_empty();
    ChainReport {
        sets,
        certificates: certs,
        symmetric_sets,
        symbolic,
        periodic,
        symmetry_evaluations,
        failures,
        verified,
    }
}

/// Name of an existing set equal to `h`, or `h` added under its own name.
fn intern(sets: &mut Vec<HSet>, h: HSet) -> String {
    if let Some(s) = sets.iter().find(|s| s.same_hset(&h)) {
        return s.name.clone();
    }
    let name = h.name.clone();
    if !sets.iter().any(|s| s.name == name) {
        sets.push(h);
    }
    name
}

/// A walk of total weight exactly `w` from `from` to `to`.
fn walk(edges: &[(usize, usize, u32)], n: usize, from: usize, to: usize, w: u32) -> Option<Vec<usize>> {
    // prev[t][v]: predecessor (node, weight) on some walk of weight t ending at v.
    let w = w as usize;
    let mut reach = vec![vec![false; n]; w + 1];
    let mut prev = vec![vec![None::<(usize, usize)>; n]; w + 1];
    reach[0][from] = true;
    for t in 0..w {
        for &(a, b, k) in edges {
            let t2 = t + k as usize;
            if reach[t][a] && t2 <= w && !reach[t2][b] {
                reach[t2][b] = true;
                prev[t2][b] = Some((a, t));
            }
        }
    }
    if !reach[w][to] {
        return None;
    }
    let mut path = vec![to];
    let (mut v, mut t) = (to, w);
    while t > 0 {
        let (a, t0) = prev[t][v].expect("reached");
        path.push(a);
        v = a;
        t = t0;
    }
    path.reverse();
    Some(path)
}

/// Simple cycles (each listed once, starting at its smallest node), with
/// their total weight; at most `limit` of them.
fn simple_cycles(edges: &[(usize, usize, u32)], n: usize, limit: usize) -> Vec<(Vec<usize>, u32)> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for start in 0..n {
        let mut stack = vec![(start, vec![start], 0u32)];
        while let Some((v, path, w)) = stack.pop() {
            for &(a, b, k) in edges.iter().rev() {
                if a != v || b < start {
                    continue;
                }
                if b == start {
                    if seen.insert((path.clone(), w + k)) {
                        out.push((path.clone(), w + k));
                        if out.len() >= limit {
                            return out;
                        }
                    }
                } else if !path.contains(&b) {
                    let mut p = path.clone();
                    p.push(b);
                    stack.push((b, p, w + k));
                }
            }
        }
    }
    out.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    out
}
