//! Directed-rounding primitives.
//!
//! Every native operation is performed in round-to-nearest and the exact
//! rounding error is recovered with an error-free transformation (TwoSum or
//! FMA residual). The result is nudged to the neighbouring float only when
//! the error points outward, which yields the correctly rounded down/up
//! value without touching the FPU rounding mode.

/// Below this magnitude FMA residuals may themselves be inexact, so we nudge
/// unconditionally.
const TINY: f64 = 1.0e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - q` where `q` is the rounded quotient.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        0.0
    } else if (r < 0.0) == (b < 0.0) {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return q;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if a < TINY {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, a) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if !s.is_finite() {
        return s;
    }
    if a < TINY {
        return s.next_up();
    }
    if (-s).mul_add(s, a) > 0.0 {
        s.next_up()
    } else {
        s
    }
}
