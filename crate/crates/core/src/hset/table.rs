//! Line-oriented text format for frames, base points and covering chains.
//!
//! ```text
//! matrix M1 = [a, b; c, d]            entries: decimals or compact intervals
//! point P1 = (pi/2; 1.0989566711567_{13}^{31})
//! theorem p1p2
//! title free text
//! scale 1e-3
//! set N0 = P1 + M1 * [-0.8, 0.8] x [-180, 80]
//! set N2 = (1.32082; 1.62293) + [0.734429, 0.734429; 0.678686, -0.678686] * [-0.5, 0.5] x [-30, 30]
//! chain N0 => N0 => N1 =>^2 N1
//! symmetric N0 N4
//! close-by-symmetry
//! claim N0 N1 power 1
//! ```
//!
//! A base point with an interval `phi` is placed at the exact decimal
//! midpoint of the interval. A frame given by interval entries with the
//! mirror structure `[a, a; b, -b]` becomes the point frame
//! `[mid a, mid a; mid b, -mid b]`, so that `R(N)^T = N` holds exactly for
//! symmetric boxes centered on `theta = pi/2`. Other frames use the midpoint
//! (or nearest double) of each entry.

use std::collections::BTreeMap;

use crate::interval::{
    decimal_midpoint, interval_endpoints, parse_interval_inward, IMat, Interval, ParseError,
};

use super::{BasePoint, Frame, HSet, HSetError, Relation, ThetaCoord};

pub const PRELUDE: &str = include_str!("../../data/prelude.txt");

/// Built-in theorem tables, by id.
pub const BUILTIN: [(&str, &str); 6] = [
    ("p1p2", include_str!("../../data/p1p2.txt")),
    ("p1p1", include_str!("../../data/p1p1.txt")),
    ("p2p2", include_str!("../../data/p2p2.txt")),
    ("p3p3", include_str!("../../data/p3p3.txt")),
    ("p1p3", include_str!("../../data/p1p3.txt")),
    ("p2p3", include_str!("../../data/p2p3.txt")),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct TableError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> TableError {
    TableError { line, msg: msg.into() }
}

/// A named matrix with its published entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEntry {
    pub text: [[String; 2]; 2],
    pub enclosure: IMat<2>,
    pub frame: Frame,
}

/// A named point of the section.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEntry {
    pub theta: ThetaCoord,
    pub phi_text: String,
    /// Inward rounding of the published `phi` interval (outward for a
    /// single decimal).
    pub phi_inward: Interval,
    pub base: BasePoint,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Prelude {
    pub matrices: BTreeMap<String, MatrixEntry>,
    pub points: BTreeMap<String, PointEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremTable {
    pub id: String,
    pub title: String,
    pub scale: String,
    pub sets: Vec<HSet>,
    pub relations: Vec<Relation>,
    /// The chains as written, one string per `chain` line.
    pub chains: Vec<String>,
    pub symmetric: Vec<String>,
    pub close_by_symmetry: bool,
    pub claim: Option<(String, String, u32)>,
}

impl TheoremTable {
    pub fn set(&self, name: &str) -> Option<&HSet> {
        self.sets.iter().find(|s| s.name == name)
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Splits `[a, b; c, d]` into its four entries.
fn matrix_entries(s: &str, line: usize) -> Result<[[String; 2]; 2], TableError> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected [a, b; c, d], got {s}")))?;
    let rows: Vec<Vec<String>> = inner
        .split(';')
        .map(|r| r.split(',').map(|e| e.trim().to_string()).collect())
        .collect();
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(err(line, format!("matrix must be 2x2: {s}")));
    }
    Ok([
        [rows[0][0].clone(), rows[0][1].clone()],
        [rows[1][0].clone(), rows[1][1].clone()],
    ])
}

fn is_compact(e: &str) -> bool {
    interval_endpoints(e).map(|(a, b)| a != b).unwrap_or(false)
}

fn matrix(name: Option<&str>, text: [[String; 2]; 2], line: usize) -> Result<MatrixEntry, TableError> {
    let pe = |e: ParseError| err(line, e.to_string());
    let mut enc = IMat::<2>::zero();
    for i in 0..2 {
        for j in 0..2 {
            enc.0[i][j] = text[i][j].parse::<Interval>().map_err(pe)?;
        }
    }
    let intervals = text.iter().flatten().any(|e| is_compact(e));
    let m = if intervals {
        let a = enc[(0, 0)].intersect(enc[(0, 1)]);
        let b = enc[(1, 0)].intersect(-enc[(1, 1)]);
        match (a, b) {
            (Some(a), Some(b)) => [[a.mid(), a.mid()], [b.mid(), -b.mid()]],
            _ => enc.mid(),
        }
    } else {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = text[i][j]
                    .parse::<f64>()
                    .map_err(|_| err(line, format!("bad entry {}", text[i][j])))?;
            }
        }
        m
    };
    Ok(MatrixEntry {
        text,
        enclosure: enc,
        frame: Frame {
            name: name.map(str::to_string),
            m,
        },
    })
}

/// `(theta; phi)` where `theta` is `pi/2`, `k*pi/2` or a decimal.
fn point_literal(s: &str, line: usize) -> Result<PointEntry, TableError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("expected (theta; phi), got {s}")))?;
    let (th, ph) = inner
        .split_once(';')
        .ok_or_else(|| err(line, format!("expected (theta; phi), got {s}")))?;
    let pe = |e: ParseError| err(line, e.to_string());
    let th = th.trim();
    let theta = if let Some(k) = th.strip_suffix("pi/2") {
        let k = k.trim_end_matches('*');
        let n = if k.is_empty() {
            1
        } else {
            k.parse::<i64>().map_err(|_| err(line, format!("bad theta {th}")))?
        };
        ThetaCoord {
            half_pis: n,
            offset: "0".into(),
        }
    } else {
        ThetaCoord::decimal(th).map_err(pe)?
    };
    let ph = ph.trim();
    let (lo, hi) = interval_endpoints(ph).map_err(pe)?;
    let phi = if lo == hi { lo } else { decimal_midpoint(&lo, &hi).map_err(pe)? };
    Ok(PointEntry {
        theta: theta.clone(),
        phi_text: ph.to_string(),
        phi_inward: if is_compact(ph) || ph.starts_with('[') {
            parse_interval_inward(ph).map_err(pe)?
        } else {
            ph.parse::<Interval>().map_err(pe)?
        },
        base: BasePoint { theta, phi },
    })
}

fn assignment(rest: &str, line: usize) -> Result<(&str, &str), TableError> {
    let (n, v) = rest
        .split_once('=')
        .ok_or_else(|| err(line, "expected NAME = value"))?;
    let n = n.trim();
    if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(line, format!("bad name {n:?}")));
    }
    Ok((n, v.trim()))
}

impl Prelude {
    pub fn parse(text: &str) -> Result<Prelude, TableError> {
        let mut p = Prelude::default();
        for (line, l) in lines(text) {
            let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            match kw {
                "matrix" => {
                    let (n, v) = assignment(rest, line)?;
                    let m = matrix(Some(n), matrix_entries(v, line)?, line)?;
                    p.matrices.insert(n.to_string(), m);
                }
                "point" => {
                    let (n, v) = assignment(rest, line)?;
                    p.points.insert(n.to_string(), point_literal(v, line)?);
                }
                _ => return Err(err(line, format!("unknown keyword {kw}"))),
            }
        }
        Ok(p)
    }

    pub fn builtin() -> Prelude {
        Prelude::parse(PRELUDE).expect("built-in prelude parses")
    }
}

/// `[a, b] x [c, d]`.
fn box_literal(s: &str, line: usize) -> Result<[[String; 2]; 2], TableError> {
    let (x, y) = s
        .split_once(" x ")
        .ok_or_else(|| err(line, format!("expected [a, b] x [c, d], got {s}")))?;
    let side = |t: &str| -> Result<[String; 2], TableError> {
        let (a, b) = interval_endpoints(t).map_err(|e| err(line, e.to_string()))?;
        Ok([a, b])
    };
    Ok([side(x)?, side(y)?])
}

/// Parses `A =>^k B => C` into relations.
fn chain(s: &str, line: usize) -> Result<Vec<Relation>, TableError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.len() < 3 || toks.len() % 2 == 0 {
        return Err(err(line, format!("malformed chain {s}")));
    }
    let mut out = Vec::new();
    for w in toks[..toks.len() - 1].chunks(2).zip(toks[2..].iter().step_by(2)) {
        let ([from, arrow], to) = (w.0, w.1) else { unreachable!() };
        let k = match arrow.strip_prefix("=>") {
            Some("") => 1,
            Some(p) => p
                .strip_prefix('^')
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| err(line, format!("bad arrow {arrow}")))?,
            None => return Err(err(line, format!("bad arrow {arrow}"))),
        };
        out.push(Relation::new(from, to, k));
    }
    Ok(out)
}

impl TheoremTable {
    pub fn parse(text: &str, prelude: &Prelude) -> Result<TheoremTable, TableError> {
        let mut t = TheoremTable {
            id: String::new(),
            title: String::new(),
            scale: "1".into(),
            sets: Vec::new(),
            relations: Vec::new(),
            chains: Vec::new(),
            symmetric: Vec::new(),
            close_by_symmetry: false,
            claim: None,
        };
        let mut pending = Vec::new();
        for (line, l) in lines(text) {
            let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let rest = rest.trim();
            match kw {
                "theorem" => t.id = rest.to_string(),
                "title" => t.title = rest.to_string(),
                "scale" => {
                    crate::interval::canonical_decimal(rest).map_err(|e| err(line, e.to_string()))?;
                    t.scale = rest.to_string();
                }
                "set" => pending.push((line, rest.to_string(), t.scale.clone())),
                "chain" => {
                    t.relations.extend(chain(rest, line)?);
                    t.chains.push(rest.to_string());
                }
                "symmetric" => t.symmetric.extend(rest.split_whitespace().map(str::to_string)),
                "close-by-symmetry" => t.close_by_symmetry = true,
                "claim" => {
                    let w: Vec<&str> = rest.split_whitespace().collect();
                    match w.as_slice() {
                        [a, b, "power", k] => {
                            let k = k.parse().map_err(|_| err(line, format!("bad power {k}")))?;
                            t.claim = Some((a.to_string(), b.to_string(), k));
                        }
                        _ => return Err(err(line, "expected: claim A B power K")),
                    }
                }
                _ => return Err(err(line, format!("unknown keyword {kw}"))),
            }
        }
        if t.id.is_empty() {
            return Err(err(0, "missing theorem line"));
        }
        for (line, s, scale) in pending {
            t.sets.push(set_line(&s, &scale, prelude, line)?);
        }
        for r in &t.relations {
            for n in [&r.from, &r.to] {
                if t.set(n).is_none() {
                    return Err(err(0, format!("chain refers to undefined set {n}")));
                }
            }
        }
        Ok(t)
    }

    pub fn builtin(id: &str) -> Option<TheoremTable> {
        let prelude = Prelude::builtin();
        BUILTIN
            .iter()
            .find(|(n, _)| *n == id)
            .map(|(_, text)| TheoremTable::parse(text, &prelude).expect("built-in table parses"))
    }
}

fn set_line(s: &str, scale: &str, prelude: &Prelude, line: usize) -> Result<HSet, TableError> {
    let (name, v) = assignment(s, line)?;
    let (base, rest) = v
        .split_once(" + ")
        .ok_or_else(|| err(line, "expected p + A * box"))?;
    let (frame, bx) = rest
        .split_once(" * ")
        .ok_or_else(|| err(line, "expected p + A * box"))?;
    let base = base.trim();
    let p = match prelude.points.get(base) {
        Some(pt) => pt.base.clone(),
        None if base.starts_with('(') => point_literal(base, line)?.base,
        None => return Err(err(line, format!("unknown point {base}"))),
    };
    let frame = frame.trim();
    let frame = match prelude.matrices.get(frame) {
        Some(m) => m.frame.clone(),
        None if frame.starts_with('[') => matrix(None, matrix_entries(frame, line)?, line)?.frame,
        None => return Err(err(line, format!("unknown matrix {frame}"))),
    };
    let b = box_literal(bx.trim(), line)?;
    let b = [[b[0][0].as_str(), b[0][1].as_str()], [b[1][0].as_str(), b[1][1].as_str()]];
    HSet::new(name, p, frame, b, scale).map_err(|e: HSetError| err(line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables_parse() {
        let pre = Prelude::builtin();
        assert_eq!(pre.matrices.len(), 3);
        assert_eq!(pre.points["P3"].base.phi, "1.7120425161121605");
        for (id, _) in BUILTIN {
            let t = TheoremTable::builtin(id).unwrap();
            assert_eq!(t.id, id);
            assert!(!t.relations.is_empty());
        }
    }

    #[test]
    fn chain_arrows() {
        let r = chain("A => B =>^2 C => A", 1).unwrap();
        assert_eq!(r, vec![Relation::new("A", "B", 1), Relation::new("B", "C", 2), Relation::new("C", "A", 1)]);
        assert!(chain("A =>", 1).is_err());
        assert!(chain("A =>^0 B", 1).is_err());
        assert!(chain("A -> B", 1).is_err());
    }

    #[test]
    fn p3p3_structure() {
        let t = TheoremTable::builtin("p3p3").unwrap();
        assert_eq!(t.relations.len(), 7);
        assert_eq!(t.relations.iter().filter(|r| r.k == 2).count(), 1);
        assert_eq!(t.claim, Some(("N0".into(), "N1".into(), 5)));
        let n3 = t.set("N3").unwrap();
        assert_eq!(n3.frame.m, [[0.866025, -0.5], [0.5, 0.866025]]);
        assert_eq!(n3.p.theta, ThetaCoord::decimal("1.82077").unwrap());
    }

    #[test]
    fn symmetric_frames_and_sets() {
        let pre = Prelude::builtin();
        for m in pre.matrices.values() {
            let f = m.frame.m;
            assert_eq!(f[0][0], f[0][1]);
            assert_eq!(f[1][0], -f[1][1]);
            for i in 0..2 {
                for j in 0..2 {
                    assert!(m.enclosure[(i, j)].contains(f[i][j]));
                }
            }
        }
        for id in ["p1p3", "p2p3"] {
            let t = TheoremTable::builtin(id).unwrap();
            assert!(t.close_by_symmetry);
            for n in &t.symmetric {
                assert!(t.set(n).unwrap().is_r_symmetric(), "{id} {n}");
            }
        }
        let t = TheoremTable::builtin("p1p2").unwrap();
        assert!(!t.set("N0").unwrap().is_r_symmetric());
    }

    #[test]
    fn rejects_bad_input() {
        let pre = Prelude::builtin();
        assert!(TheoremTable::parse("theorem x\nset N0 = Q + M1 * [-1, 1] x [-1, 1]", &pre).is_err());
        assert!(TheoremTable::parse("theorem x\nset N0 = P1 + M9 * [-1, 1] x [-1, 1]", &pre).is_err());
        assert!(TheoremTable::parse("theorem x\nset N0 = P1 + M1 * [1, 1] x [-1, 1]", &pre).is_err());
        assert!(TheoremTable::parse("theorem x\nset N0 = P1 + M1 * [-1, 1] x [-1, 1]\nchain N0 => N1", &pre).is_err());
        assert!(TheoremTable::parse("bogus", &pre).is_err());
        let e = Prelude::parse("matrix A = [1, 2; 3]").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
