//! Decimal parsing with directed rounding.

use std::cmp::Ordering;

use num_bigint::BigUint;

use super::Interval;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed decimal '{0}'")]
    Decimal(String),
    #[error("malformed interval '{0}'")]
    Interval(String),
    #[error("interval bounds out of order: {0} > {1}")]
    Reversed(String, String),
}

/// Exact decimal `(-1)^neg * digits * 10^exp10`.
struct Decimal {
    neg: bool,
    digits: BigUint,
    exp10: i64,
}

fn parse_exact(s: &str) -> Result<Decimal, ParseError> {
    let err = || ParseError::Decimal(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let all: String = int_part.chars().chain(frac_part.chars()).collect();
    if !all.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = if all.is_empty() {
        BigUint::from(0u32)
    } else {
        BigUint::parse_bytes(all.as_bytes(), 10).ok_or_else(err)?
    };
    Ok(Decimal {
        neg,
        digits,
        exp10: exp - frac_part.len() as i64,
    })
}

/// Compare `|dec|` with a finite non-negative `x` exactly.
fn cmp_abs(dec: &Decimal, x: f64) -> Ordering {
    debug_assert!(x >= 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp2) = if exp_bits == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    // dec = D * 10^E, x = m * 2^Q; scale both to integers.
    let mut lhs = dec.digits.clone();
    let mut rhs = BigUint::from(mant);
    if dec.exp10 >= 0 {
        lhs *= BigUint::from(10u32).pow(dec.exp10 as u32);
    } else {
        rhs *= BigUint::from(10u32).pow((-dec.exp10) as u32);
    }
    if exp2 >= 0 {
        rhs <<= exp2 as usize;
    } else {
        lhs <<= (-exp2) as usize;
    }
    lhs.cmp(&rhs)
}

/// Largest float `<=` and smallest float `>=` the exact decimal value of `s`.
pub fn parse_decimal_bounds(s: &str) -> Result<(f64, f64), ParseError> {
    let dec = parse_exact(s)?;
    let nearest: f64 = s
        .trim()
        .parse()
        .map_err(|_| ParseError::Decimal(s.to_string()))?;
    if !nearest.is_finite() {
        return Err(ParseError::Decimal(s.to_string()));
    }
    let ord = cmp_abs(&dec, nearest.abs());
    let (lo_abs, hi_abs) = match ord {
        Ordering::Equal => (nearest.abs(), nearest.abs()),
        Ordering::Greater => (nearest.abs(), nearest.abs().next_up()),
        Ordering::Less => (nearest.abs().next_down().max(0.0), nearest.abs()),
    };
    if dec.neg {
        Ok((-hi_abs, -lo_abs))
    } else {
        Ok((lo_abs, hi_abs))
    }
}

impl Decimal {
    /// Strip trailing zeros so equal values get equal representations.
    fn normalized(mut self) -> Decimal {
        let ten = BigUint::from(10u32);
        let zero = BigUint::from(0u32);
        if self.digits == zero {
            return Decimal { neg: false, digits: zero, exp10: 0 };
        }
        while &self.digits % &ten == zero {
            self.digits /= &ten;
            self.exp10 += 1;
        }
        self
    }

    fn render(&self) -> String {
        let mut s = self.digits.to_string();
        if self.exp10 >= 0 {
            s.extend(std::iter::repeat_n('0', self.exp10 as usize));
        } else {
            let frac = (-self.exp10) as usize;
            if s.len() <= frac {
                s = "0".repeat(frac + 1 - s.len()) + &s;
            }
            s.insert(s.len() - frac, '.');
        }
        if self.neg {
            s.insert(0, '-');
        }
        s
    }
}

/// Canonical spelling of an exact decimal: equal numbers give equal strings.
pub fn canonical_decimal(s: &str) -> Result<String, ParseError> {
    Ok(parse_exact(s)?.normalized().render())
}

/// Exact negation of a decimal string.
pub fn negate_decimal(s: &str) -> Result<String, ParseError> {
    let mut d = parse_exact(s)?.normalized();
    d.neg = !d.neg && d.digits != BigUint::from(0u32);
    Ok(d.render())
}

/// Exact midpoint of two non-negative decimals of equal sign.
pub fn decimal_midpoint(a: &str, b: &str) -> Result<String, ParseError> {
    let (x, y) = (parse_exact(a)?, parse_exact(b)?);
    if x.neg != y.neg {
        return Err(ParseError::Decimal(format!("{a} / {b}")));
    }
    let e = x.exp10.min(y.exp10);
    let ten = BigUint::from(10u32);
    let sum = &x.digits * ten.pow((x.exp10 - e) as u32) + &y.digits * ten.pow((y.exp10 - e) as u32);
    let mid = Decimal { neg: x.neg, digits: sum * 5u32, exp10: e - 1 };
    Ok(mid.normalized().render())
}

/// Exact sum of two decimals.
pub fn decimal_add(a: &str, b: &str) -> Result<String, ParseError> {
    let (x, y) = (parse_exact(a)?, parse_exact(b)?);
    let e = x.exp10.min(y.exp10);
    let ten = BigUint::from(10u32);
    let xd = &x.digits * ten.pow((x.exp10 - e) as u32);
    let yd = &y.digits * ten.pow((y.exp10 - e) as u32);
    let (neg, digits) = if x.neg == y.neg {
        (x.neg, xd + yd)
    } else if xd >= yd {
        (x.neg, xd - yd)
    } else {
        (y.neg, yd - xd)
    };
    Ok(Decimal { neg, digits, exp10: e }.normalized().render())
}

/// Exact product of two decimals.
pub fn decimal_mul(a: &str, b: &str) -> Result<String, ParseError> {
    let (x, y) = (parse_exact(a)?, parse_exact(b)?);
    let d = Decimal {
        neg: x.neg != y.neg,
        digits: x.digits * y.digits,
        exp10: x.exp10 + y.exp10,
    };
    Ok(d.normalized().render())
}

/// The two decimal endpoints of an interval literal, as strings.
pub fn interval_endpoints(s: &str) -> Result<(String, String), ParseError> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let (a, b) = inner.split_once(',').ok_or(ParseError::Interval(s.into()))?;
        return Ok((a.trim().to_string(), b.trim().to_string()));
    }
    if let Some((prefix, sub, sup)) = split_compact(t) {
        return Ok((format!("{prefix}{sub}"), format!("{prefix}{sup}")));
    }
    parse_exact(t)?;
    Ok((t.to_string(), t.to_string()))
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn map_script(c: char, table: &[char; 10]) -> Option<char> {
    table
        .iter()
        .position(|&t| t == c)
        .map(|d| char::from(b'0' + d as u8))
}

/// Splits compact notation into `(prefix, lower_suffix, upper_suffix)`.
fn split_compact(s: &str) -> Option<(String, String, String)> {
    if let Some(i) = s.find("_{") {
        let prefix = &s[..i];
        let rest = &s[i + 2..];
        let j = rest.find('}')?;
        let sub = &rest[..j];
        let rest = rest[j + 1..].strip_prefix("^{")?;
        let k = rest.find('}')?;
        let sup = &rest[..k];
        if !rest[k + 1..].trim().is_empty() {
            return None;
        }
        return Some((prefix.to_string(), sub.to_string(), sup.to_string()));
    }
    let first_script = s
        .char_indices()
        .find(|&(_, c)| SUBSCRIPTS.contains(&c) || SUPERSCRIPTS.contains(&c))?;
    let prefix = &s[..first_script.0];
    let mut sub = String::new();
    let mut sup = String::new();
    for c in s[first_script.0..].chars() {
        if let Some(d) = map_script(c, &SUBSCRIPTS) {
            sub.push(d);
        } else {
            sup.push(map_script(c, &SUPERSCRIPTS)?);
        }
    }
    Some((prefix.to_string(), sub, sup))
}

pub(super) fn parse_interval(s: &str) -> Result<Interval, ParseError> {
    let t = s.trim();
    let err = || ParseError::Interval(s.to_string());
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let (a, b) = inner.split_once(',').ok_or_else(err)?;
        let (lo, _) = parse_decimal_bounds(a)?;
        let (_, hi) = parse_decimal_bounds(b)?;
        return Interval::try_new(lo, hi)
            .map_err(|_| ParseError::Reversed(a.trim().into(), b.trim().into()));
    }
    if let Some((prefix, sub, sup)) = split_compact(t) {
        if sub.is_empty() || sup.is_empty() || !prefix.contains('.') {
            return Err(err());
        }
        let lo_s = format!("{prefix}{sub}");
        let hi_s = format!("{prefix}{sup}");
        let (lo, _) = parse_decimal_bounds(&lo_s)?;
        let (_, hi) = parse_decimal_bounds(&hi_s)?;
        return Interval::try_new(lo, hi).map_err(|_| ParseError::Reversed(lo_s, hi_s));
    }
    let (lo, hi) = parse_decimal_bounds(t)?;
    Ok(Interval::new(lo, hi))
}

/// Parse an interval rounding its bounds *inward*: the result is contained in
/// the exact decimal interval. Used when testing containment in a published
/// enclosure.
pub fn parse_interval_inward(s: &str) -> Result<Interval, ParseError> {
    let outer = parse_interval(s)?;
    let (lo_s, hi_s) = interval_endpoints(s)?;
    let (_, lo) = parse_decimal_bounds(&lo_s)?;
    let (hi, _) = parse_decimal_bounds(&hi_s)?;
    debug_assert!(outer.lo() <= lo && hi <= outer.hi());
    Interval::try_new(lo, hi).map_err(|_| ParseError::Reversed(lo_s, hi_s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_decimals_stay_points() {
        assert_eq!(parse_decimal_bounds("0.5").unwrap(), (0.5, 0.5));
        assert_eq!(parse_decimal_bounds("-180").unwrap(), (-180.0, -180.0));
        let (lo, hi) = parse_decimal_bounds("1e-3").unwrap();
        assert!(lo < hi && lo <= 0.001 && 0.001 <= hi);
    }

    #[test]
    fn inexact_decimals_bracket() {
        let (lo, hi) = parse_decimal_bounds("0.1").unwrap();
        assert_eq!(lo.next_up(), hi);
        assert!(lo <= 0.1 && 0.1 <= hi);
        let (lo, hi) = parse_decimal_bounds("-0.1").unwrap();
        assert_eq!(lo.next_up(), hi);
        assert!(lo < 0.0);
    }

    #[test]
    fn compact_notation() {
        let a: Interval = "1.0989566711567_{13}^{31}".parse().unwrap();
        let b: Interval = "1.0989566711567₁₃³¹".parse().unwrap();
        assert_eq!(a, b);
        let (lo, _) = parse_decimal_bounds("1.098956671156713").unwrap();
        let (_, hi) = parse_decimal_bounds("1.098956671156731").unwrap();
        assert_eq!(a, Interval::new(lo, hi));
        let n: Interval = "-0.7072570610_{335054}^{281689}".parse().unwrap();
        assert!(n.hi() < 0.0 && n.lo() < n.hi());
        assert!("1.0_{9}^{1}".parse::<Interval>().is_err());
    }

    #[test]
    fn inward_is_inside_outward() {
        let s = "1.712042516112_{098}^{223}";
        let o: Interval = s.parse().unwrap();
        let i = parse_interval_inward(s).unwrap();
        assert!(i.subset(o));
        assert!(i.diam() > 1.2e-13);
    }

    #[test]
    fn decimal_helpers() {
        assert_eq!(canonical_decimal("1.5000").unwrap(), "1.5");
        assert_eq!(canonical_decimal("-0").unwrap(), "0");
        assert_eq!(canonical_decimal("0.00120").unwrap(), "0.0012");
        assert_eq!(canonical_decimal("2.5e2").unwrap(), "250");
        assert_eq!(negate_decimal("1.58669").unwrap(), "-1.58669");
        assert_eq!(negate_decimal("-0.0").unwrap(), "0");
        assert_eq!(
            decimal_midpoint("1.098956671156713", "1.098956671156731").unwrap(),
            "1.098956671156722"
        );
        assert_eq!(
            decimal_midpoint("1.712042516112098", "1.712042516112223").unwrap(),
            "1.7120425161121605"
        );
        assert_eq!(decimal_add("1.58669", "-1.58669").unwrap(), "0");
        assert_eq!(decimal_add("0", "0.001").unwrap(), "0.001");
        assert_eq!(decimal_add("-0.5", "0.25").unwrap(), "-0.25");
        assert_eq!(decimal_mul("1e-3", "1.2").unwrap(), "0.0012");
        assert_eq!(decimal_mul("-180", "0.1").unwrap(), "-18");
        let (a, b) = interval_endpoints("0.70695646939_{59338}^{77127}").unwrap();
        assert_eq!((a.as_str(), b.as_str()), ("0.7069564693959338", "0.7069564693977127"));
    }

    #[test]
    fn malformed_input() {
        assert!("abc".parse::<Interval>().is_err());
        assert!("[2,1]".parse::<Interval>().is_err());
        assert!("".parse::<Interval>().is_err());
    }
}
