//! Computable sufficient conditions for a covering relation `M => N` with
//! one exit and one entry direction.
//!
//! In the normalized chart of `N`, with `f_c` the map in normalized
//! coordinates of both sets:
//!
//! * exit: `f_c({-1} x [-1,1])` lies in `{x < -1}` and `f_c({1} x [-1,1])`
//!   in `{x > 1}`, or the other way round (degree `+1` or `-1`);
//! * strip: every point of `f_c([-1,1]^2)` has `|y| < 1` or `|x| > 1`, so
//!   the image avoids the entry set of `N` and everything above and below
//!   it inside `|x| <= 1`.
//!
//! Together they imply the covering relation: the straight-line homotopy to
//! `(x, y) -> (2 x, 0)` (or `-2 x`) never touches the entry set and keeps
//! the exit edges outside `N`. Both conditions are checked on pieces of `M`
//! obtained by adaptive bisection.
//!
//! On the cylinder the image is lifted once, by the multiple of `pi`
//! nearest to the image of the center of `M`, and every piece must stay
//! within half a period of the base point of `N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interval::{IVec, Interval};

use super::{HSet, PlanarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertDirection {
    Forward,
    Backward,
    SymmetryDerived,
}

/// `Covering`: `from => to`. `BackCovering`: `from <= to` in the sense
/// `to^T => from^T` under the inverse map. Either way orbits go from `from`
/// to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Covering,
    BackCovering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSettings {
    pub max_depth: u32,
}

impl Default for CoverSettings {
    fn default() -> Self {
        CoverSettings { max_depth: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub from: String,
    pub to: String,
    pub kind: RelationKind,
    pub iterate: u32,
    pub direction: CertDirection,
    pub verified: bool,
    /// Deepest bisection level used.
    pub subdivision_depth: u32,
    /// Pieces evaluated (edges and interior).
    pub pieces: usize,
    /// `+1` if the left edge maps left, `-1` if it maps right.
    pub degree: Option<i8>,
    /// Hulls of the normalized `x` of the images of the left and right edges.
    pub left_edge_x: Option<Interval>,
    pub right_edge_x: Option<Interval>,
    /// Hull of the normalized image of the whole set.
    pub image_hull: Option<IVec<2>>,
    /// Multiple of the period subtracted from the image.
    pub lift: i64,
    pub diagnostics: Vec<String>,
    pub settings: CoverSettings,
    /// Images requested from the map by this check (cached or not).
    pub map_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Evaluated {
    sub: IVec<2>,
    w: IVec<2>,
    sens: [[f64; 2]; 2],
    in_window: bool,
    /// No point of the image can lie in the window.
    outside_window: bool,
}

#[derive(Debug)]
struct Failure {
    sub: IVec<2>,
    w: Option<IVec<2>>,
    reason: String,
}

struct Ctx<'a, M: PlanarMap> {
    m: &'a HSet,
    k: u32,
    map: &'a M,
    chart: super::Chart,
    shift: IVec<2>,
    window: Option<Interval>,
}

impl<M: PlanarMap> Ctx<'_, M> {
    fn eval(&self, sub: &IVec<2>) -> Result<Evaluated, Failure> {
        let img = self.map.image(&self.m.piece(sub), self.k).map_err(|e| Failure {
            sub: *sub,
            w: None,
            reason: format!("map failed: {e}"),
        })?;
        let (w, sens) = img.in_chart(&self.chart, &self.shift);
        let (in_window, outside_window) = match self.window {
            None => (true, false),
            Some(win) => {
                let th = img.hull()[0] - self.shift[0];
                (th.subset_interior(win), th.hi() <= win.lo() || th.lo() >= win.hi())
            }
        };
        Ok(Evaluated {
            sub: *sub,
            w,
            sens,
            in_window,
            outside_window,
        })
    }
}

fn bisect(sub: &IVec<2>, axis: usize) -> [IVec<2>; 2] {
    let m = sub[axis].mid();
    let mut lo = *sub;
    let mut hi = *sub;
    lo[axis] = Interval::new(sub[axis].lo(), m);
    hi[axis] = Interval::new(m, sub[axis].hi());
    [lo, hi]
}

/// Source axis to split: the one contributing most to the coordinate
/// `row` of the image; ties go to `x`. When the spread of `row` is mostly
/// not attributable to either source direction (curvature, remainder), the
/// wider side of the piece is split.
fn split_axis(e: &Evaluated, row: usize) -> usize {
    let c0 = e.sens[row][0];
    let c1 = e.sens[row][1];
    let rest = e.w[row].rad() - (c0 + c1);
    if rest > c0.max(c1) {
        return if e.sub[1].diam() > e.sub[0].diam() { 1 } else { 0 };
    }
    if c1 > c0 {
        1
    } else {
        0
    }
}

/// Breadth-first adaptive bisection. `classify` returns `Ok(())` when a
/// piece passes, `Err(Some(axis))` to split it along `axis`, `Err(None)` when
/// the enclosure shows that no subdivision can make it pass. Levels are
/// processed in parallel with their order preserved, so the outcome does not
/// depend on scheduling.
fn refine<M: PlanarMap>(
    ctx: &Ctx<'_, M>,
    start: IVec<2>,
    max_depth: u32,
    classify: impl Fn(&Evaluated) -> Result<(), Option<usize>> + Sync,
    on_pass: &mut dyn FnMut(&Evaluated),
) -> (u32, usize, Result<(), Failure>) {
    let mut level = vec![start];
    let mut depth = 0;
    let mut pieces = 0;
    loop {
        pieces += level.len();
        let results: Vec<Result<Evaluated, Failure>> = level.par_iter().map(|s| ctx.eval(s)).collect();
        let mut next = Vec::new();
        for r in results {
            let e = match r {
                Ok(e) => e,
                Err(f) if depth < max_depth => {
                    // Integration can fail on pieces that are too large.
                    let axis = if f.sub[0].diam() >= f.sub[1].diam() { 0 } else { 1 };
                    next.extend(bisect(&f.sub, axis));
                    continue;
                }
                Err(f) => return (depth, pieces, Err(f)),
            };
            match classify(&e) {
                Ok(()) => on_pass(&e),
                Err(Some(axis)) if depth < max_depth => next.extend(bisect(&e.sub, axis)),
                Err(verdict) => {
                    let reason = if e.outside_window {
                        "image leaves the chart window".to_string()
                    } else if verdict.is_none() {
                        "condition refuted: every point of the piece violates it".to_string()
                    } else if e.in_window {
                        "condition violated at depth cap".to_string()
                    } else {
                        "image leaves the chart window".to_string()
                    };
                    return (
                        depth,
                        pieces,
                        Err(Failure {
                            sub: e.sub,
                            w: Some(e.w),
                            reason,
                        }),
                    );
                }
            }
        }
        if next.is_empty() {
            return (depth, pieces, Ok(()));
        }
        level = next;
        depth += 1;
    }
}

fn describe(what: &str, f: &Failure) -> String {
    match f.w {
        Some(w) => format!(
            "{what}: {} on piece x in {}, y in {}; image x in {}, y in {}",
            f.reason, f.sub[0], f.sub[1], w[0], w[1]
        ),
        None => format!("{what}: {} on piece x in {}, y in {}", f.reason, f.sub[0], f.sub[1]),
    }
}

/// Checks `M => N` under `map^k`.
pub fn check_covering<M: PlanarMap>(
    m: &HSet,
    n: &HSet,
    k: u32,
    map: &M,
    settings: &CoverSettings,
) -> CoveringCertificate {
    let mut cert = CoveringCertificate {
        from: m.name.clone(),
        to: n.name.clone(),
        kind: RelationKind::Covering,
        iterate: k,
        direction: CertDirection::Forward,
        verified: false,
        subdivision_depth: 0,
        pieces: 0,
        degree: None,
        left_edge_x: None,
        right_edge_x: None,
        image_hull: None,
        lift: 0,
        diagnostics: Vec::new(),
        settings: settings.clone(),
        map_calls: 0,
    };
    for h in [m, n] {
        if let Err(e) = h.validate() {
            cert.diagnostics.push(e.to_string());
            return cert;
        }
    }

    let chart = n.chart();
    let pn = n.p.interval();
    let mut shift = IVec::zero();
    let mut window = None;
    if let Some(per) = map.theta_period() {
        let center = IVec::from_point([0.0, 0.0]);
        match map.image(&m.piece(&center), k) {
            Ok(img) => {
                let th = img.hull()[0].mid();
                cert.lift = ((th - pn[0].mid()) / per.mid()).round() as i64;
            }
            Err(e) => {
                cert.diagnostics.push(format!("center of {} could not be mapped: {e}", m.name));
                cert.map_calls = 1;
                return cert;
            }
        }
        shift[0] = per * cert.lift as f64;
        window = Some(Interval::new((pn[0] - per / 2.0).hi(), (pn[0] + per / 2.0).lo()));
    }
    let ctx = Ctx {
        m,
        k,
        map,
        chart,
        shift,
        window,
    };
    let unit = Interval::new(-1.0, 1.0);
    let depth = settings.max_depth;

    // Exit edges: split along y only.
    let mut sides = [None, None];
    let mut edge_x = [None::<Interval>, None];
    let mut ok = true;
    for (idx, x) in [-1.0, 1.0].into_iter().enumerate() {
        let mut side: Option<Option<Side>> = None;
        let mut hull: Option<Interval> = None;
        let classify = |e: &Evaluated| {
            if e.outside_window {
                Err(None)
            } else if e.in_window && (e.w[0].hi() < -1.0 || e.w[0].lo() > 1.0) {
                Ok(())
            } else if e.in_window && e.w[0].lo() > -1.0 && e.w[0].hi() < 1.0 {
                Err(None)
            } else {
                Err(Some(1))
            }
        };
        let (d, p, res) = refine(
            &ctx,
            IVec([Interval::point(x), unit]),
            depth,
            classify,
            &mut |e| {
                let s = if e.w[0].hi() < -1.0 { Side::Left } else { Side::Right };
                side = Some(match side {
                    None => Some(s),
                    Some(Some(prev)) if prev == s => Some(s),
                    _ => None,
                });
                hull = Some(hull.map_or(e.w[0], |h| h.hull(e.w[0])));
            },
        );
        cert.subdivision_depth = cert.subdivision_depth.max(d);
        cert.pieces += p;
        edge_x[idx] = hull;
        match res {
            Err(f) => {
                ok = false;
                let which = if idx == 0 { "left exit edge" } else { "right exit edge" };
                cert.diagnostics.push(describe(which, &f));
            }
            Ok(()) => match side {
                Some(Some(s)) => sides[idx] = Some(s),
                _ => {
                    ok = false;
                    cert.diagnostics.push(format!(
                        "{} edge image lies on both sides of the target",
                        if idx == 0 { "left" } else { "right" }
                    ));
                }
            },
        }
    }
    cert.left_edge_x = edge_x[0];
    cert.right_edge_x = edge_x[1];
    match (sides[0], sides[1]) {
        (Some(Side::Left), Some(Side::Right)) => cert.degree = Some(1),
        (Some(Side::Right), Some(Side::Left)) => cert.degree = Some(-1),
        (Some(a), Some(_)) => {
            ok = false;
            cert.diagnostics.push(format!(
                "both exit edges map to the {} of the target (degree 0)",
                if a == Side::Left { "left" } else { "right" }
            ));
        }
        _ => {}
    }

    // Strip condition on the whole set; skipped when the exit condition
    // already failed.
    if ok {
        let mut image_hull: Option<IVec<2>> = None;
        let classify = |e: &Evaluated| {
            if e.outside_window {
                return Err(None);
            }
            if !e.in_window {
                return Err(Some(split_axis(e, 0)));
            }
            let strip = e.w[1].lo() > -1.0 && e.w[1].hi() < 1.0;
            let beyond = e.w[0].hi() < -1.0 || e.w[0].lo() > 1.0;
            let inside = e.w[0].lo() > -1.0 && e.w[0].hi() < 1.0;
            if strip || beyond {
                Ok(())
            } else if inside && (e.w[1].lo() >= 1.0 || e.w[1].hi() <= -1.0) {
                Err(None)
            } else {
                Err(Some(split_axis(e, 1)))
            }
        };
        let (d, p, res) = refine(&ctx, IVec([unit, unit]), depth, classify, &mut |e| {
            image_hull = Some(image_hull.map_or(e.w, |h| h.hull(&e.w)));
        });
        cert.subdivision_depth = cert.subdivision_depth.max(d);
        cert.pieces += p;
        cert.image_hull = image_hull;
        if let Err(f) = res {
            ok = false;
            cert.diagnostics.push(describe("entry condition", &f));
        }
    }
    cert.verified = ok;
    cert.map_calls = cert.pieces as u64 + u64::from(map.theta_period().is_some());
    cert
}
