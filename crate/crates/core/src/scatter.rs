//! Plain floating-point iteration of the Poincare map for plots. Nothing here
//! is rigorous.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::model::{field, Coefficients, ModelParams};

/// RK4 steps per return to the section.
pub const STEPS_PER_RETURN: usize = 400;

/// `f64` Poincare map; the return time is exactly `2 pi`.
#[derive(Debug, Clone, Copy)]
pub struct FloatMap {
    co: Coefficients<f64>,
    steps: usize,
}

impl FloatMap {
    pub fn new(params: &ModelParams) -> Self {
        FloatMap {
            co: params.coefficients_f64(),
            steps: STEPS_PER_RETURN,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    /// Flow for time `t` (negative: backwards).
    pub fn flow(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        let n = ((self.steps as f64 * t.abs() / TAU).ceil() as usize).max(1);
        let h = t / n as f64;
        let f = |s: [f64; 3]| field(s, &self.co);
        let axpy = |a: [f64; 3], k: [f64; 3], c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
        let mut s = x;
        for _ in 0..n {
            let k1 = f(s);
            let k2 = f(axpy(s, k1, h / 2.0));
            let k3 = f(axpy(s, k2, h / 2.0));
            let k4 = f(axpy(s, k3, h));
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        s
    }

    /// `P` (or `P^{-1}` when `backward`), without reducing `theta`.
    pub fn apply(&self, p: [f64; 2], backward: bool) -> [f64; 2] {
        let t = if backward { -TAU } else { TAU };
        let s = self.flow([p[0], p[1], 0.0], t);
        [s[0], s[1]]
    }

    /// Central differences of `P`, step `h`.
    pub fn jacobian(&self, p: [f64; 2], h: f64) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut a = p;
            let mut b = p;
            a[c] += h;
            b[c] -= h;
            let (fa, fb) = (self.apply(a, false), self.apply(b, false));
            for r in 0..2 {
                j[r][c] = (fa[r] - fb[r]) / (2.0 * h);
            }
        }
        j
    }
}

/// `theta` reduced to `[0, pi)`.
pub fn wrap_theta(theta: f64) -> f64 {
    theta.rem_euclid(PI)
}

/// Default seeds: `n` points on `theta = pi/2` with `phi` spread over
/// `[0.3, 2.2]`.
pub fn default_seeds(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.5 };
            [FRAC_PI_2, 0.3 + 1.9 * s]
        })
        .collect()
}

/// One row of a scatter file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub theta: f64,
    pub phi: f64,
    pub orbit: usize,
}

/// `iters` iterates of each seed (the seed itself included), `theta`
/// reduced mod `pi`.
pub fn section_scatter(map: &FloatMap, seeds: &[[f64; 2]], iters: usize) -> Vec<ScatterPoint> {
    let mut out = Vec::with_capacity(seeds.len() * iters);
    for (id, &seed) in seeds.iter().enumerate() {
        let mut p = seed;
        for _ in 0..iters {
            out.push(ScatterPoint {
                theta: wrap_theta(p[0]),
                phi: p[1],
                orbit: id,
            });
            p = map.apply(p, false);
            if !p[1].is_finite() {
                break;
            }
        }
    }
    out
}

/// Unit eigenvectors `(unstable, stable)` of a real 2x2 matrix with real
/// eigenvalues, first component non-negative.
pub fn eigenvectors(j: [[f64; 2]; 2]) -> Option<([f64; 2], [f64; 2], [f64; 2])> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return None;
    }
    let r = disc.sqrt();
    let big = if tr >= 0.0 { (tr + r) / 2.0 } else { (tr - r) / 2.0 };
    let small = det / big;
    let vec = |l: f64| {
        let (a, b) = if (j[0][1]).abs() + (l - j[0][0]).abs() >= (l - j[1][1]).abs() + j[1][0].abs() {
            (j[0][1], l - j[0][0])
        } else {
            (l - j[1][1], j[1][0])
        };
        let n = a.hypot(b);
        let (a, b) = (a / n, b / n);
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            [-a, -b]
        } else {
            [a, b]
        }
    };
    Some((vec(big), vec(small), [big, small]))
}

/// Which branch of a manifold a polyline belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Unstable,
    Stable,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Unstable => "unstable",
            Branch::Stable => "stable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldPoint {
    pub branch: Branch,
    pub iterate: usize,
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
}

/// Fragments of the stable and unstable manifolds of the fixed point `p`:
/// `points` samples of the segment `p + s v`, `s in [-length, length]`,
/// pushed forward (unstable) or backward (stable) up to `iters` times.
pub fn manifold_scatter(
    map: &FloatMap,
    p: [f64; 2],
    length: f64,
    points: usize,
    iters: usize,
) -> Option<Vec<ManifoldPoint>> {
    let (vu, vs, _) = eigenvectors(map.jacobian(p, 1e-6))?;
    let mut out = Vec::new();
    for (branch, v) in [(Branch::Unstable, vu), (Branch::Stable, vs)] {
        let n = if length == 0.0 { 1 } else { points.max(2) };
        let mut seg: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let s = if n == 1 { 0.0 } else { length * (2.0 * i as f64 / (n - 1) as f64 - 1.0) };
                [p[0] + s * v[0], p[1] + s * v[1]]
            })
            .collect();
        for it in 0..=iters {
            for (idx, q) in seg.iter().enumerate() {
                out.push(ManifoldPoint {
                    branch,
                    iterate: it,
                    index: idx,
                    theta: wrap_theta(q[0]),
                    phi: q[1],
                });
            }
            if it < iters {
                let back = branch == Branch::Stable;
                seg = seg.iter().map(|&q| map.apply(q, back)).collect();
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_orbit_is_integrable() {
        // With e = 0 and theta = f + c the torque is constant in the rotating
        // frame; phi = 1, theta = f is an exact solution.
        let m = FloatMap::new(&ModelParams::new("0", "0.79").unwrap());
        let q = m.apply([0.0, 1.0], false);
        assert!((q[0] - TAU).abs() < 1e-12 && (q[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let m = FloatMap::new(&ModelParams::default());
        let p = [1.3, 1.2];
        let q = m.apply(m.apply(p, false), true);
        assert!((q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9);
    }

    #[test]
    fn eigenvectors_of_diagonal() {
        let (u, s, l) = eigenvectors([[0.25, 0.0], [0.0, 4.0]]).unwrap();
        assert_eq!(l, [4.0, 0.25]);
        assert_eq!(u, [0.0, 1.0]);
        assert_eq!(s, [1.0, 0.0]);
        assert!(eigenvectors([[0.0, -1.0], [1.0, 0.0]]).is_none());
    }

    #[test]
    fn zero_length_segment_is_the_point() {
        let m = FloatMap::new(&ModelParams::default());
        let p = [FRAC_PI_2, 1.7120425161121605];
        let pts = manifold_scatter(&m, p, 0.0, 50, 0).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|q| q.theta == FRAC_PI_2 && q.phi == p[1]));
    }

    #[test]
    fn seeds_on_the_symmetry_line() {
        let s = default_seeds(12);
        assert_eq!(s.len(), 12);
        assert!(s.iter().all(|p| p[0] == FRAC_PI_2));
        assert_eq!(s[0][1], 0.3);
    }
}
