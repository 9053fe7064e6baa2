//! Outward-rounded interval arithmetic over `f64`.
//!
//! Every operation returns an interval containing the exact real result set
//! of its operands. Rounding is directed without touching the FPU mode (see
//! [`round`]), so values can be shared across threads freely.

pub mod linalg;
mod parse;
pub mod round;

pub use linalg::{IMat, IVec};
pub use parse::{
    canonical_decimal, decimal_add, decimal_midpoint, decimal_mul, interval_endpoints, negate_decimal, parse_decimal_bounds,
    parse_interval_inward, ParseError,
};

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use round::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZero(Interval),
    #[error("square root of an interval with negative part: {0}")]
    NegativeSqrt(Interval),
    #[error("interval matrix is singular (determinant encloses zero)")]
    SingularMatrix,
    #[error("invalid interval bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SerdeInterval", into = "SerdeInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Two-term enclosure of pi: `PI_HI < pi < PI_HI + PI_LO_UP`.
const PI_HI: f64 = std::f64::consts::PI;
const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Panics if `lo > hi` or either bound is NaN.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, DomainError> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(DomainError::InvalidBounds(lo, hi))
        }
    }

    #[inline]
    pub const fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    /// Symmetric interval `[-r, r]`.
    #[inline]
    pub fn symmetric(r: f64) -> Interval {
        let r = r.abs();
        Interval { lo: -r, hi: r }
    }

    /// Enclosure of pi.
    pub fn pi() -> Interval {
        Interval {
            lo: PI_HI,
            hi: add_up(PI_HI, PI_LO),
        }
    }

    pub fn half_pi() -> Interval {
        Interval::pi() * 0.5
    }

    pub fn two_pi() -> Interval {
        Interval::pi() * 2.0
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Approximate midpoint, not rigorous.
    #[inline]
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Width, rounded up.
    #[inline]
    pub fn diam(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound on the distance from [`Interval::mid`] to either end.
    pub fn rad(self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    /// Largest absolute value in the interval.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    /// `self ⊆ other`.
    #[inline]
    pub fn subset(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊂ int(other)`, the interval Newton inclusion test.
    #[inline]
    pub fn subset_interior(self, other: Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    #[inline]
    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn hull_point(self, x: f64) -> Interval {
        Interval {
            lo: self.lo.min(x),
            hi: self.hi.max(x),
        }
    }

    /// `None` when the intervals are disjoint.
    #[inline]
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn intersects(self, other: Interval) -> bool {
        self.intersect(other).is_some()
    }

    /// Strictly below `x` everywhere.
    #[inline]
    pub fn lt(self, x: f64) -> bool {
        self.hi < x
    }

    /// Strictly above `x` everywhere.
    #[inline]
    pub fn gt(self, x: f64) -> bool {
        self.lo > x
    }

    /// Widen by `eps` on both sides.
    pub fn inflate(self, eps: f64) -> Interval {
        Interval {
            lo: sub_down(self.lo, eps),
            hi: add_up(self.hi, eps),
        }
    }

    /// Scale the radius about the midpoint by `factor` and add `eps`.
    pub fn blow(self, factor: f64, eps: f64) -> Interval {
        let m = self.mid();
        let r = mul_up(self.rad(), factor);
        let r = add_up(r, eps);
        Interval {
            lo: sub_down(m, r).min(self.lo),
            hi: add_up(m, r).max(self.hi),
        }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval {
            lo: mul_down(a.lo, a.lo),
            hi: mul_up(a.hi, a.hi),
        }
    }

    pub fn powi(self, n: u32) -> Interval {
        if n == 0 {
            return Interval::ONE;
        }
        if n % 2 == 0 {
            let a = self.abs();
            Interval {
                lo: pow_down_nonneg(a.lo, n),
                hi: pow_up_nonneg(a.hi, n),
            }
        } else {
            let lo = if self.lo >= 0.0 {
                pow_down_nonneg(self.lo, n)
            } else {
                -pow_up_nonneg(-self.lo, n)
            };
            let hi = if self.hi >= 0.0 {
                pow_up_nonneg(self.hi, n)
            } else {
                -pow_down_nonneg(-self.hi, n)
            };
            Interval { lo, hi }
        }
    }

    pub fn sqrt(self) -> Result<Interval, DomainError> {
        if self.lo < 0.0 {
            return Err(DomainError::NegativeSqrt(self));
        }
        Ok(Interval {
            lo: sqrt_down(self.lo),
            hi: sqrt_up(self.hi),
        })
    }

    pub fn recip(self) -> Result<Interval, DomainError> {
        Interval::ONE.checked_div(self)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, DomainError> {
        if rhs.contains_zero() {
            return Err(DomainError::DivisionByZero(rhs));
        }
        let (a, b) = (self, rhs);
        let r = if b.lo > 0.0 {
            if a.lo >= 0.0 {
                Interval::new(div_down(a.lo, b.hi), div_up(a.hi, b.lo))
            } else if a.hi <= 0.0 {
                Interval::new(div_down(a.lo, b.lo), div_up(a.hi, b.hi))
            } else {
                Interval::new(div_down(a.lo, b.lo), div_up(a.hi, b.lo))
            }
        } else if a.lo >= 0.0 {
            Interval::new(div_down(a.hi, b.hi), div_up(a.lo, b.lo))
        } else if a.hi <= 0.0 {
            Interval::new(div_down(a.hi, b.lo), div_up(a.lo, b.hi))
        } else {
            Interval::new(div_down(a.hi, b.hi), div_up(a.lo, b.hi))
        };
        Ok(r)
    }

    pub fn sin(self) -> Interval {
        trig_range(self, TrigKind::Sin)
    }

    pub fn cos(self) -> Interval {
        trig_range(self, TrigKind::Cos)
    }

    /// Sine and cosine of the same argument.
    pub fn sin_cos(self) -> (Interval, Interval) {
        (self.sin(), self.cos())
    }
}

fn pow_down_nonneg(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_down(r, x);
    }
    r
}

fn pow_up_nonneg(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_up(r, x);
    }
    r
}

#[derive(Clone, Copy)]
enum TrigKind {
    Sin,
    Cos,
}

/// Range enclosure of sin/cos. Endpoint values come from libm (error below
/// one ulp) widened by one ulp; interior extrema are detected against a
/// rigorous enclosure of the critical points `c0 + m*pi`.
fn trig_range(x: Interval, kind: TrigKind) -> Interval {
    let full = Interval::new(-1.0, 1.0);
    if !x.is_finite() || x.diam() >= 2.0 * PI_HI {
        return full;
    }
    let (fa, fb) = match kind {
        TrigKind::Sin => (x.lo.sin(), x.hi.sin()),
        TrigKind::Cos => (x.lo.cos(), x.hi.cos()),
    };
    let mut lo = fa.min(fb).next_down().max(-1.0);
    let mut hi = fa.max(fb).next_up().min(1.0);
    if x.lo == x.hi {
        return Interval { lo, hi };
    }

    // Extrema of sin sit at pi/2 + m*pi, of cos at m*pi. Value is +1 for
    // even m and -1 for odd m.
    let pi = Interval::pi();
    let offset = match kind {
        TrigKind::Sin => Interval::half_pi(),
        TrigKind::Cos => Interval::ZERO,
    };
    let m_lo = ((x.lo - offset.hi) / PI_HI).floor() as i64 - 1;
    let m_hi = ((x.hi - offset.lo) / PI_HI).ceil() as i64 + 1;
    for m in m_lo..=m_hi {
        let c = offset + pi * (m as f64);
        // Conservatively treat any overlap as containing the critical point.
        if c.hi < x.lo || c.lo > x.hi {
            continue;
        }
        if m.rem_euclid(2) == 0 {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    Interval { lo, hi }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl std::str::FromStr for Interval {
    type Err = ParseError;

    /// Accepts a decimal (`0.1`), a bracketed pair (`[1, 2]`), or the compact
    /// notation `1.0989566711567_{13}^{31}` / `1.0989566711567₁₃³¹`. Bounds
    /// are rounded outward.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_interval(s)
    }
}

/// Serialized form: decimal strings that re-parse to a superset.
#[derive(Serialize, Deserialize)]
struct SerdeInterval {
    lo: String,
    hi: String,
}

impl From<Interval> for SerdeInterval {
    fn from(x: Interval) -> Self {
        SerdeInterval {
            lo: format!("{:e}", x.lo),
            hi: format!("{:e}", x.hi),
        }
    }
}

impl TryFrom<SerdeInterval> for Interval {
    type Error = ParseError;

    fn try_from(v: SerdeInterval) -> Result<Self, Self::Error> {
        let (lo, _) = parse_decimal_bounds(&v.lo)?;
        let (_, hi) = parse_decimal_bounds(&v.hi)?;
        Interval::try_new(lo, hi).map_err(|_| ParseError::Reversed(v.lo, v.hi))
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: sub_down(self.lo, rhs.hi),
            hi: sub_up(self.hi, rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let a = self;
        if a.lo >= 0.0 {
            if b.lo >= 0.0 {
                Interval { lo: mul_down(a.lo, b.lo), hi: mul_up(a.hi, b.hi) }
            } else if b.hi <= 0.0 {
                Interval { lo: mul_down(a.hi, b.lo), hi: mul_up(a.lo, b.hi) }
            } else {
                Interval { lo: mul_down(a.hi, b.lo), hi: mul_up(a.hi, b.hi) }
            }
        } else if a.hi <= 0.0 {
            if b.lo >= 0.0 {
                Interval { lo: mul_down(a.lo, b.hi), hi: mul_up(a.hi, b.lo) }
            } else if b.hi <= 0.0 {
                Interval { lo: mul_down(a.hi, b.hi), hi: mul_up(a.lo, b.lo) }
            } else {
                Interval { lo: mul_down(a.lo, b.hi), hi: mul_up(a.lo, b.lo) }
            }
        } else if b.lo >= 0.0 {
            Interval { lo: mul_down(a.lo, b.hi), hi: mul_up(a.hi, b.hi) }
        } else if b.hi <= 0.0 {
            Interval { lo: mul_down(a.hi, b.lo), hi: mul_up(a.lo, b.lo) }
        } else {
            Interval {
                lo: mul_down(a.lo, b.hi).min(mul_down(a.hi, b.lo)),
                hi: mul_up(a.lo, b.lo).max(mul_up(a.hi, b.hi)),
            }
        }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: f64) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs),
            hi: add_up(self.hi, rhs),
        }
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: f64) -> Interval {
        Interval {
            lo: sub_down(self.lo, rhs),
            hi: sub_up(self.hi, rhs),
        }
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: f64) -> Interval {
        if rhs >= 0.0 {
            Interval {
                lo: mul_down(self.lo, rhs),
                hi: mul_up(self.hi, rhs),
            }
        } else {
            Interval {
                lo: mul_down(self.hi, rhs),
                hi: mul_up(self.lo, rhs),
            }
        }
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        rhs * self
    }
}

impl Div<f64> for Interval {
    type Output = Interval;
    /// Panics on a zero divisor; use [`Interval::checked_div`] for data.
    #[inline]
    fn div(self, rhs: f64) -> Interval {
        assert!(rhs != 0.0, "division by zero");
        if rhs > 0.0 {
            Interval {
                lo: div_down(self.lo, rhs),
                hi: div_up(self.hi, rhs),
            }
        } else {
            Interval {
                lo: div_down(self.hi, rhs),
                hi: div_up(self.lo, rhs),
            }
        }
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl MulAssign for Interval {
    #[inline]
    fn mul_assign(&mut self, rhs: Interval) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(-1.0, 2.0) - iv(3.0, 4.0), iv(-5.0, -1.0));
        let third = Interval::ONE.checked_div(Interval::point(3.0)).unwrap();
        assert!(third.hi() > third.lo());
        assert!(third.diam() < 1e-16);
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        assert!(matches!(
            iv(1.0, 2.0).checked_div(iv(-1.0, 1.0)),
            Err(DomainError::DivisionByZero(_))
        ));
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(iv(-2.0, 1.0).powi(2), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3), iv(-8.0, 1.0));
        assert_eq!(iv(4.0, 9.0).sqrt().unwrap(), iv(2.0, 3.0));
        assert!(iv(-1.0, 4.0).sqrt().is_err());
    }

    #[test]
    fn trig_critical_points() {
        let hp = Interval::half_pi();
        let s = Interval::new(0.0, hp.lo()).sin();
        assert!(s.lo() <= 0.0 && s.lo() > -1e-300);
        assert!(s.hi() <= 1.0 && s.hi() > 1.0 - 1e-15);
        let c = Interval::new(0.0, Interval::pi().hi()).cos();
        assert_eq!(c, iv(-1.0, 1.0));
        let s = Interval::new(1.0, 2.0).sin();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() < 1.0f64.sin() && s.lo() > 0.84);
    }

    #[test]
    fn set_predicates() {
        assert_eq!(iv(0.0, 1.0).hull(iv(2.0, 3.0)), iv(0.0, 3.0));
        assert!(iv(1.0, 2.0).subset_interior(iv(0.0, 3.0)));
        assert!(!iv(0.0, 2.0).subset_interior(iv(0.0, 3.0)));
        assert_eq!(iv(0.0, 1.0).intersect(iv(2.0, 3.0)), None);
        assert_eq!(iv(0.0, 2.0).intersect(iv(1.0, 3.0)), Some(iv(1.0, 2.0)));
    }

    #[test]
    fn pi_enclosure() {
        let p = Interval::pi();
        assert!(p.lo() < p.hi());
        assert_eq!(p.lo().next_up(), p.hi());
    }
}
