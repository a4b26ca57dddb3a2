//! Certified real enclosures for the numeric (classical Jacobi–Perron) mode.
//!
//! A [`BigReal`] is a closed interval with dyadic endpoints. Arithmetic is
//! exact on the endpoints and then rounded outward to a fixed number of
//! significant bits, so the true value always stays inside.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// `m · 2^e`, with `m` odd (or `m = e = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        Dyadic { m: m >> tz, e: e + tz as i64 }
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self::new(n, 0)
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Both mantissas scaled to the smaller exponent.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.e.min(other.e);
        (&self.m << (self.e - e) as u64, &other.m << (other.e - e) as u64, e)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.e >= 0 {
            BigRational::from_integer(&self.m << self.e as u64)
        } else {
            BigRational::new(self.m.clone(), BigInt::one() << (-self.e) as u64)
        }
    }

    /// `n/d · 2^e` rounded to `bits` significant bits.
    fn ratio(n: &BigInt, d: &BigInt, e: i64, bits: u64, up: bool) -> Dyadic {
        assert!(!d.is_zero(), "division by zero");
        if n.is_zero() {
            return Dyadic::zero();
        }
        let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
        let s = bits as i64 + d.bits() as i64 - n.bits() as i64 + 1;
        let (num, den) = if s >= 0 { (n << s as u64, d) } else { (n, d << (-s) as u64) };
        let q = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
        Dyadic::new(q, e - s).round(bits, up)
    }

    /// `q` rounded to `bits` significant bits; exact when it fits.
    pub fn from_rational(q: &BigRational, bits: u64, up: bool) -> Self {
        if q.denom().magnitude().count_ones() == 1 {
            let e = -(q.denom().trailing_zeros().unwrap_or(0) as i64);
            return Dyadic::new(q.numer().clone(), e).round(bits, up);
        }
        Self::ratio(q.numer(), q.denom(), 0, bits, up)
    }

    pub fn round(self, bits: u64, up: bool) -> Self {
        let len = self.m.bits();
        if len <= bits {
            return self;
        }
        let shift = len - bits;
        let unit = BigInt::one() << shift;
        let m = if up { self.m.div_ceil(&unit) } else { self.m.div_floor(&unit) };
        Dyadic::new(m, self.e + shift as i64)
    }

    pub fn add(&self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.m * k, self.e)
    }

    /// `self / rhs` rounded to `bits` significant bits.
    pub fn div(&self, rhs: &Dyadic, bits: u64, up: bool) -> Dyadic {
        Self::ratio(&self.m, &rhs.m, self.e - rhs.e, bits, up)
    }

    /// Exact `⌊self / rhs⌋`.
    pub fn floor_div(&self, rhs: &Dyadic) -> BigInt {
        let (a, b, _) = self.aligned(rhs);
        a.div_floor(&b)
    }

    pub fn floor(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            self.m.div_floor(&(BigInt::one() << (-self.e) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.m.bits().saturating_sub(60);
        let m = (&self.m >> shift).to_f64().unwrap_or(f64::NAN);
        let e = self.e + shift as i64;
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.m.sign().cmp(&other.m.sign()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigReal {
    lo: Dyadic,
    hi: Dyadic,
}

impl BigReal {
    pub fn exact(q: Dyadic) -> Self {
        BigReal { lo: q.clone(), hi: q }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::exact(Dyadic::from_integer(n.into()))
    }

    /// `[lo, hi]` rounded outward to `bits`; panics if `lo > hi`.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, bits: u64) -> Self {
        assert!(lo <= hi, "empty enclosure");
        BigReal {
            lo: Dyadic::from_rational(lo, bits, false),
            hi: Dyadic::from_rational(hi, bits, true),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        self.hi.sub(&self.lo).to_rational()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if the enclosure excludes 0 (or is exactly 0).
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else if self.is_exact_zero() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }

    pub fn overlaps(&self, other: &BigReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, rhs: &BigReal, bits: u64) -> BigReal {
        BigReal {
            lo: self.lo.add(&rhs.lo).round(bits, false),
            hi: self.hi.add(&rhs.hi).round(bits, true),
        }
    }

    pub fn sub(&self, rhs: &BigReal, bits: u64) -> BigReal {
        BigReal {
            lo: self.lo.sub(&rhs.hi).round(bits, false),
            hi: self.hi.sub(&rhs.lo).round(bits, true),
        }
    }

    pub fn mul_int(&self, k: &BigInt, bits: u64) -> BigReal {
        let (a, b) = (self.lo.mul_int(k), self.hi.mul_int(k));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        BigReal {
            lo: lo.round(bits, false),
            hi: hi.round(bits, true),
        }
    }

    /// `self − k·y`, rounded once.
    pub fn sub_scaled(&self, y: &BigReal, k: &BigInt, bits: u64) -> BigReal {
        let (a, b) = (y.lo.mul_int(k), y.hi.mul_int(k));
        let (klo, khi) = if a <= b { (a, b) } else { (b, a) };
        BigReal {
            lo: self.lo.sub(&khi).round(bits, false),
            hi: self.hi.sub(&klo).round(bits, true),
        }
    }

    fn corners<T: Ord>(&self, rhs: &BigReal, f: impl Fn(&Dyadic, &Dyadic) -> T) -> (T, T) {
        let mut c = [
            f(&self.lo, &rhs.lo),
            f(&self.lo, &rhs.hi),
            f(&self.hi, &rhs.lo),
            f(&self.hi, &rhs.hi),
        ];
        c.sort();
        let [lo, _, _, hi] = c;
        (lo, hi)
    }

    /// Enclosure of the quotient, rounded outward; `None` if the divisor may be 0.
    pub fn quotient(&self, rhs: &BigReal, bits: u64) -> Option<BigReal> {
        if rhs.contains_zero() {
            return None;
        }
        let (lo, _) = self.corners(rhs, |a, b| a.div(b, bits, false));
        let (_, hi) = self.corners(rhs, |a, b| a.div(b, bits, true));
        Some(BigReal { lo, hi })
    }

    /// `⌊self / rhs⌋` if it is the same integer across both enclosures.
    pub fn floor_quotient(&self, rhs: &BigReal) -> Option<BigInt> {
        if rhs.contains_zero() {
            return None;
        }
        let (a, b) = self.corners(rhs, Dyadic::floor_div);
        (a == b).then_some(a)
    }

    /// The floor of the value if both endpoints have the same floor.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let a = self.lo.floor();
        let b = self.hi.floor();
        (a == b).then_some(a)
    }

    pub fn to_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid numeric literal {0:?}: expected an integer, a decimal, sqrt(n) or cbrt(n)")]
pub struct ParseLiteralError(pub String);

/// A real input coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumericLiteral {
    Rational(BigRational),
    /// `sign · radicand^(1/degree)`
    Root { negative: bool, degree: u32, radicand: BigInt },
}

impl NumericLiteral {
    /// Enclosure of width at most `2^-bits` relative to the magnitude.
    pub fn enclose(&self, bits: u64) -> BigReal {
        match self {
            NumericLiteral::Rational(q) => BigReal::from_bounds(q, q, bits),
            NumericLiteral::Root { negative, degree, radicand } => {
                let r = (radicand << (bits * *degree as u64)).nth_root(*degree);
                let exact = r.pow(*degree) == radicand << (bits * *degree as u64);
                let e = -(bits as i64);
                let lo = Dyadic::new(r.clone(), e);
                let hi = if exact { lo.clone() } else { Dyadic::new(r + 1, e) };
                if *negative {
                    BigReal { lo: Dyadic::new(-hi.m, hi.e), hi: Dyadic::new(-lo.m, lo.e) }
                } else {
                    BigReal { lo, hi }
                }
            }
        }
    }
}

impl FromStr for NumericLiteral {
    type Err = ParseLiteralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLiteralError(s.to_string());
        let t = s.trim();
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        for (name, degree) in [("sqrt", 2u32), ("cbrt", 3)] {
            if let Some(arg) = body.strip_prefix(name) {
                let arg = arg.trim().strip_prefix('(').and_then(|a| a.strip_suffix(')')).ok_or_else(err)?;
                let radicand: BigInt = arg.trim().parse().map_err(|_| err())?;
                if radicand.is_negative() && degree == 2 {
                    return Err(err());
                }
                let negative = negative ^ radicand.is_negative();
                return Ok(NumericLiteral::Root { negative, degree, radicand: radicand.abs() });
            }
        }
        let q = parse_decimal(body).ok_or_else(err)?;
        Ok(NumericLiteral::Rational(if negative { -q } else { q }))
    }
}

/// `"12"`, `"3.25"`, `"7/4"`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    Some(BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)))
}

impl fmt::Display for NumericLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericLiteral::Rational(q) => write!(f, "{q}"),
            NumericLiteral::Root { negative, degree, radicand } => {
                let name = if *degree == 2 { "sqrt" } else { "cbrt" };
                write!(f, "{}{name}({radicand})", if *negative { "-" } else { "" })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dy(x: &BigRational, bits: u64, up: bool) -> BigRational {
        Dyadic::from_rational(x, bits, up).to_rational()
    }

    #[test]
    fn rounding_is_outward() {
        let x = q(1, 3);
        let lo = dy(&x, 20, false);
        let hi = dy(&x, 20, true);
        assert!(lo < x && x < hi);
        assert!(&hi - &lo < q(1, 1 << 20));
        assert_eq!(dy(&q(5, 4), 20, false), q(5, 4));
        assert_eq!(dy(&q(-7, 1), 3, true), q(-7, 1));
        assert_eq!(dy(&q(-1, 3), 4, true), -dy(&q(1, 3), 4, false));
        let big = q(1_000_003, 1);
        assert!(dy(&big, 8, false) <= big && big <= dy(&big, 8, true));
        assert_eq!(Dyadic::new(BigInt::from(12), 0), Dyadic::new(BigInt::from(3), 2));
    }

    #[test]
    fn dyadic_ops() {
        let a = Dyadic::from_rational(&q(7, 4), 64, false);
        let b = Dyadic::from_rational(&q(-3, 8), 64, false);
        assert_eq!(a.add(&b).to_rational(), q(11, 8));
        assert_eq!(a.sub(&b).to_rational(), q(17, 8));
        assert_eq!(b.floor(), BigInt::from(-1));
        assert_eq!(a.floor_div(&b), BigInt::from(-5));
        assert!(b < a && Dyadic::zero() > b);
        let third = Dyadic::from_integer(1.into()).div(&Dyadic::from_integer(3.into()), 30, true);
        assert!(third.to_rational() > q(1, 3));
        assert!((a.to_f64() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn literals() {
        assert_eq!("12".parse::<NumericLiteral>().unwrap(), NumericLiteral::Rational(q(12, 1)));
        assert_eq!("-3.25".parse::<NumericLiteral>().unwrap(), NumericLiteral::Rational(q(-13, 4)));
        assert_eq!("7/4".parse::<NumericLiteral>().unwrap(), NumericLiteral::Rational(q(7, 4)));
        assert!("sqrt(-2)".parse::<NumericLiteral>().is_err());
        assert!("cbrt 4".parse::<NumericLiteral>().is_err());
        assert!("1.2.3".parse::<NumericLiteral>().is_err());
        let c = "cbrt(4)".parse::<NumericLiteral>().unwrap();
        assert_eq!(c.to_string(), "cbrt(4)");
        assert_eq!("-cbrt(-5)".parse::<NumericLiteral>().unwrap().to_string(), "cbrt(5)");
    }

    #[test]
    fn root_enclosures() {
        let c = "cbrt(4)".parse::<NumericLiteral>().unwrap().enclose(100);
        let four = BigRational::from_integer(4.into());
        let (lo, hi) = (c.lo().to_rational(), c.hi().to_rational());
        assert!(&lo * &lo * &lo < four && four < &hi * &hi * &hi);
        assert!(c.width() <= q(1, 1) / BigRational::from_integer(BigInt::one() << 100));
        let e = "sqrt(9)".parse::<NumericLiteral>().unwrap().enclose(50);
        assert!(e.is_exact());
        assert_eq!(e.lo().to_rational(), q(3, 1));
    }

    #[test]
    fn floors_and_quotients() {
        let z = BigReal::from_integer(10);
        let y = BigReal::from_integer(4);
        assert_eq!(z.floor_quotient(&y), Some(BigInt::from(2)));
        assert_eq!(z.quotient(&y, 64).unwrap().certified_floor(), Some(BigInt::from(2)));
        let third = BigReal::from_bounds(&(q(1, 3) - q(1, 1000)), &(q(1, 3) + q(1, 1000)), 64);
        let one = BigReal::from_integer(1);
        assert_eq!(one.floor_quotient(&third), None);
        assert_eq!(one.quotient(&third, 64).unwrap().certified_floor(), None);
        let straddle = BigReal::from_bounds(&q(-1, 10), &q(1, 10), 64);
        assert!(one.quotient(&straddle, 64).is_none() && one.floor_quotient(&straddle).is_none());
        assert_eq!(third.sign(), Some(Sign::Plus));
        assert_eq!(BigReal::from_bounds(&q(-1, 2), &q(1, 2), 64).sign(), None);
        let neg = BigReal::from_integer(-7);
        assert_eq!(neg.floor_quotient(&BigReal::from_integer(2)), Some(BigInt::from(-4)));
    }
}
