//! Random affine maps and h-sets whose covering relation has an exact
//! geometric answer.

use hyperion_core::hset::{BasePoint, CoverSettings, Frame, HSet, LinearMap, ThetaCoord};
use rand::{rngs::StdRng, Rng};

type P = [f64; 2];

/// Sutherland-Hodgman: the part of a convex polygon with `a x + b y <= c`.
pub fn clip(poly: &[P], a: f64, b: f64, c: f64) -> Vec<P> {
    let inside = |p: &P| a * p[0] + b * p[1] <= c;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fp, fq) = (a * p[0] + b * p[1] - c, a * q[0] + b * q[1] - c);
        if inside(&p) {
            out.push(p);
        }
        if (fp < 0.0) != (fq < 0.0) && fp != fq {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Affine image `w = A v + c` of the unit square, in the normalized chart
/// of the target.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub a: [[f64; 2]; 2],
    pub c: [f64; 2],
}

impl Affine {
    fn corners(&self) -> Vec<P> {
        [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]
            .iter()
            .map(|v| {
                [
                    self.a[0][0] * v[0] + self.a[0][1] * v[1] + self.c[0],
                    self.a[1][0] * v[0] + self.a[1][1] * v[1] + self.c[1],
                ]
            })
            .collect()
    }

    /// Exact covering decision with the exit edges required to land beyond
    /// `|x| = 1 + d` and the image kept out of `|x| <= 1 - d`,
    /// `|y| >= ylim - d`. `d > 0` asks for margin, `d < 0` grants it.
    pub fn covers(&self, d: f64, ylim: f64) -> bool {
        let edge = |sign: f64| {
            let x0 = self.c[0] + sign * self.a[0][0];
            (x0 - self.a[0][1].abs(), x0 + self.a[0][1].abs())
        };
        let (l, r) = (edge(-1.0), edge(1.0));
        let edges = (l.1 < -1.0 - d && r.0 > 1.0 + d) || (l.0 > 1.0 + d && r.1 < -1.0 - d);
        let poly = self.corners();
        let hits = |s: f64| {
            let p = clip(&poly, 1.0, 0.0, 1.0 - d);
            let p = clip(&p, -1.0, 0.0, 1.0 - d);
            let p = clip(&p, 0.0, -s, -(ylim - d));
            !p.is_empty()
        };
        edges && !hits(1.0) && !hits(-1.0)
    }

    /// `None` when a margin of `d` either way changes the decision.
    pub fn decision(&self, d: f64, ylim: f64) -> Option<bool> {
        let (strict, loose) = (self.covers(d, ylim), self.covers(-d, ylim));
        (strict == loose).then_some(strict)
    }
}

pub fn unit_source() -> HSet {
    let p = BasePoint {
        theta: ThetaCoord::decimal("0").unwrap(),
        phi: "0".into(),
    };
    let id = Frame {
        name: None,
        m: [[1.0, 0.0], [0.0, 1.0]],
    };
    HSet::new("M", p, id, [["-1", "1"], ["-1", "1"]], "1").unwrap()
}

/// Axis-aligned target `[-rx, rx] x [-ry, ry]` around `(mx, my)`.
pub fn target(mx: &str, my: &str, rx: &str, ry: &str) -> HSet {
    let p = BasePoint {
        theta: ThetaCoord::decimal(mx).unwrap(),
        phi: my.into(),
    };
    let id = Frame {
        name: None,
        m: [[1.0, 0.0], [0.0, 1.0]],
    };
    let (nx, ny) = (format!("-{rx}"), format!("-{ry}"));
    HSet::new("N", p, id, [[&nx, rx], [&ny, ry]], "1").unwrap()
}

/// Decimal with three digits; the value used in floating point is its
/// nearest double, as in the h-set.
fn dec(rng: &mut StdRng, lo: f64, hi: f64) -> (String, f64) {
    let s = format!("{:.3}", rng.gen_range(lo..hi));
    let v = s.parse().unwrap();
    (s, v)
}

pub struct Case {
    pub map: LinearMap,
    pub n: HSet,
    pub affine: Affine,
}

pub fn random_case(rng: &mut StdRng) -> Case {
    let (lam, mu) = (rng.gen_range(1.5..7.0), rng.gen_range(0.05..0.7));
    let (al, be): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let rot = |t: f64| [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
    let mm = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        [
            [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
            [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
        ]
    };
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let l = mm(rot(al), mm([[sign * lam, 0.0], [0.0, mu]], rot(be)));
    let t = [rng.gen_range(-0.7..0.7), rng.gen_range(-0.5..0.5)];
    let (mxs, mx) = dec(rng, -0.5, 0.5);
    let (mys, my) = (mxs.clone(), mx);
    let (rxs, rx) = dec(rng, 0.5, 2.5);
    let (rys, ry) = dec(rng, 0.5, 1.8);
    let n = target(&mxs, &mys, &rxs, &rys);
    let affine = Affine {
        a: [[l[0][0] / rx, l[0][1] / rx], [l[1][0] / ry, l[1][1] / ry]],
        c: [(t[0] - mx) / rx, (t[1] - my) / ry],
    };
    Case {
        map: LinearMap::new(l, t),
        n,
        affine,
    }
}

/// Pieces at depth 20 have images far thinner than the 0.02 margin the
/// sampled cases keep from the decision boundary; the default cap of 12
/// leaves images about 0.1 wide, which cannot resolve such margins.
pub fn fine() -> CoverSettings {
    CoverSettings { max_depth: 20 }
}

