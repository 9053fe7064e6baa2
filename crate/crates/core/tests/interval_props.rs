use hyperion_core::interval::Interval;
use proptest::prelude::*;

/// Exact comparisons of `bound` with `a^n` in big-integer arithmetic.
mod exact {
    use num_bigint::BigInt;
    use std::cmp::Ordering;

    /// `x = m * 2^e` exactly.
    fn split(x: f64) -> (BigInt, i64) {
        if x == 0.0 {
            return (BigInt::from(0), 0);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        (BigInt::from(sign) * BigInt::from(m), e)
    }

    fn cmp_pow(bound: f64, a: f64, n: u32) -> Ordering {
        let (mb, eb) = split(bound);
        let (ma, ea) = split(a);
        let mp = num_traits_pow(&ma, n);
        let ep = ea * n as i64;
        let e = eb.min(ep);
        let lhs = mb << (eb - e) as usize;
        let rhs = mp << (ep - e) as usize;
        lhs.cmp(&rhs)
    }

    fn num_traits_pow(m: &BigInt, n: u32) -> BigInt {
        (0..n).fold(BigInt::from(1), |acc, _| acc * m)
    }

    pub fn le(bound: f64, a: f64, n: u32) -> bool {
        cmp_pow(bound, a, n) != Ordering::Greater
    }

    pub fn ge(bound: f64, a: f64, n: u32) -> bool {
        cmp_pow(bound, a, n) != Ordering::Less
    }
}

/// An interval together with a point inside it.
fn ival_with_point() -> impl Strategy<Value = (Interval, f64)> {
    (-1e3..1e3f64, 0.0..10.0f64, 0.0..=1.0f64).prop_map(|(a, w, s)| {
        let x = Interval::new(a, a + w);
        let p = (a + s * w).clamp(x.lo(), x.hi());
        (x, p)
    })
}

/// Exact test of `lo <= a * b <= hi`: one rounding in `fma` keeps the sign.
fn product_in(z: Interval, a: f64, b: f64) -> bool {
    a.mul_add(b, -z.lo()) >= 0.0 && a.mul_add(b, -z.hi()) <= 0.0
}

/// Exact test of `lo <= a / b <= hi` for `b != 0`.
fn quotient_in(z: Interval, a: f64, b: f64) -> bool {
    let s = b.signum();
    s * (-z.lo()).mul_add(b, a) >= 0.0 && s * (-z.hi()).mul_add(b, a) <= 0.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn arithmetic_contains_pointwise_results((x, a) in ival_with_point(), (y, b) in ival_with_point()) {
        prop_assert!((x + y).contains(a + b));
        prop_assert!((x - y).contains(a - b));
        prop_assert!(product_in(x * y, a, b));
        prop_assert!((-x).contains(-a));
        prop_assert!(product_in(x.sqr(), a, a));
        prop_assert!(x.abs().contains(a.abs()));
        if !y.contains_zero() {
            prop_assert!(quotient_in(x.checked_div(y).unwrap(), a, b));
        } else {
            prop_assert!(x.checked_div(y).is_err());
        }
        prop_assert!(x.sin().contains(a.sin()));
        prop_assert!(x.cos().contains(a.cos()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn powers_and_roots((x, a) in ival_with_point(), n in 0u32..7) {
        let p = x.powi(n);
        prop_assert!(exact::le(p.lo(), a, n) && exact::ge(p.hi(), a, n), "{a}^{n} not in {p}");
        if x.lo() >= 0.0 {
            let r = x.sqrt().unwrap();
            prop_assert!(r.lo().mul_add(r.lo(), -a) <= 0.0 && r.hi().mul_add(r.hi(), -a) >= 0.0);
        } else {
            prop_assert!(x.sqrt().is_err());
        }
    }

    #[test]
    fn trig_range_is_sound(a in -50.0..50.0f64, w in 0.0..7.0f64) {
        let x = Interval::new(a, a + w);
        let (s, c) = (x.sin(), x.cos());
        for i in 0..=2000 {
            let t = (a + w * i as f64 / 2000.0).min(x.hi());
            prop_assert!(s.contains(t.sin()), "sin({t}) = {} not in {s}", t.sin());
            prop_assert!(c.contains(t.cos()), "cos({t}) = {} not in {c}", t.cos());
        }
        prop_assert!(s.lo() >= -1.0 && s.hi() <= 1.0);
    }

    #[test]
    fn inclusion_isotonicity(
        (x, _) in ival_with_point(),
        (y, _) in ival_with_point(),
        gx in (0.0..5.0f64, 0.0..5.0f64),
        gy in (0.0..5.0f64, 0.0..5.0f64),
    ) {
        let xx = Interval::new(x.lo() - gx.0, x.hi() + gx.1);
        let yy = Interval::new(y.lo() - gy.0, y.hi() + gy.1);
        prop_assert!((x + y).subset(xx + yy));
        prop_assert!((x - y).subset(xx - yy));
        prop_assert!((x * y).subset(xx * yy));
        prop_assert!(x.sqr().subset(xx.sqr()));
        prop_assert!(x.sin().subset(xx.sin()));
        prop_assert!(x.cos().subset(xx.cos()));
        if !yy.contains_zero() {
            prop_assert!(x.checked_div(y).unwrap().subset(xx.checked_div(yy).unwrap()));
        }
    }
}

#[test]
fn pi_enclosures_are_tight_and_correct() {
    let pi = Interval::pi();
    assert!(pi.contains(std::f64::consts::PI));
    assert!(pi.diam() <= 2.0 * f64::EPSILON * 4.0);
    assert!((Interval::two_pi() - pi * 2.0).contains(0.0));
    assert!(Interval::half_pi().contains(std::f64::consts::FRAC_PI_2));
}
