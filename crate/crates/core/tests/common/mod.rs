//! Reference computations written from the equations of motion alone, with
//! no code from the library under test.

#![allow(dead_code)]

pub mod checks;
pub mod linear;

use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub e: f64,
    pub omega2: f64,
}

pub const DEFAULT: Oracle = Oracle { e: 0.1, omega2: 0.79 };

impl Oracle {
    /// `(theta', phi', f')` with `r = (1 - e^2) / (1 + e cos f)`.
    pub fn rhs(&self, s: [f64; 3]) -> [f64; 3] {
        let [theta, phi, f] = s;
        let r = (1.0 - self.e * self.e) / (1.0 + self.e * f.cos());
        let fdot = (1.0 + self.e * f.cos()).powi(2) / (1.0 - self.e * self.e).powf(1.5);
        [phi, -self.omega2 / (2.0 * r.powi(3)) * (2.0 * (theta - f)).sin(), fdot]
    }

    /// Classical RK4 over time `t` with `n` equal steps.
    pub fn flow(&self, x: [f64; 3], t: f64, n: usize) -> [f64; 3] {
        let h = t / n as f64;
        let mut s = x;
        let add = |a: [f64; 3], k: [f64; 3], c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
        for _ in 0..n {
            let k1 = self.rhs(s);
            let k2 = self.rhs(add(s, k1, h / 2.0));
            let k3 = self.rhs(add(s, k2, h / 2.0));
            let k4 = self.rhs(add(s, k3, h));
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        s
    }

    /// Section-to-section map; the return time is `2 pi` for every orbit.
    pub fn poincare(&self, p: [f64; 2], n: usize) -> [f64; 2] {
        let s = self.flow([p[0], p[1], 0.0], TAU, n);
        [s[0], s[1]]
    }

    /// Return time `int_0^{2 pi} df / f'(f)` by the trapezoidal rule, which
    /// is spectrally accurate for periodic integrands.
    pub fn return_time_quadrature(&self, n: usize) -> f64 {
        let h = TAU / n as f64;
        (0..n).map(|i| 1.0 / self.rhs([0.0, 0.0, i as f64 * h])[2]).sum::<f64>() * h
    }
}

/// `lo <= x <= hi` after widening the interval by `tol` on both sides.
pub fn within(lo: f64, hi: f64, x: f64, tol: f64) -> bool {
    lo - tol <= x && x <= hi + tol
}
