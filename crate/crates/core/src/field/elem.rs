use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qpoly::QPoly;
use super::{CubicField, FieldError};

/// `(num₀ + num₁θ + num₂θ²) / den`, with `den > 0` and no common factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Coeffs {
    num: [BigInt; 3],
    den: BigInt,
}

impl Coeffs {
    fn normalized(mut num: [BigInt; 3], mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -std::mem::take(n);
            }
        }
        let g = num.iter().fold(den.clone(), |g, n| g.gcd(n));
        if !g.is_one() {
            for n in num.iter_mut() {
                *n /= &g;
            }
            den /= &g;
        }
        Coeffs { num, den }
    }

    fn from_rationals(q: &[BigRational; 3]) -> Self {
        let den = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = q.clone().map(|c| (c * BigRational::from_integer(den.clone())).to_integer());
        Self::normalized(num, den)
    }

    fn rational(q: &BigRational) -> Self {
        Coeffs {
            num: [q.numer().clone(), BigInt::zero(), BigInt::zero()],
            den: q.denom().clone(),
        }
    }

    fn rationals(&self) -> [BigRational; 3] {
        self.num.clone().map(|n| BigRational::new(n, self.den.clone()))
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn is_rational(&self) -> bool {
        self.num[1].is_zero() && self.num[2].is_zero()
    }

    fn add(&self, other: &Coeffs) -> Coeffs {
        if self.den == other.den {
            let num = [0, 1, 2].map(|i| &self.num[i] + &other.num[i]);
            return Self::normalized(num, self.den.clone());
        }
        let num = [0, 1, 2].map(|i| &self.num[i] * &other.den + &other.num[i] * &self.den);
        Self::normalized(num, &self.den * &other.den)
    }

    fn neg(&self) -> Coeffs {
        Coeffs {
            num: self.num.clone().map(|n| -n),
            den: self.den.clone(),
        }
    }

    /// Product reduced modulo the minimal polynomial (`poly` ascending).
    fn mul(&self, other: &Coeffs, poly: &[BigInt; 4]) -> Coeffs {
        let (a, b) = (&self.num, &other.num);
        let mut c = [
            &a[0] * &b[0],
            &a[0] * &b[1] + &a[1] * &b[0],
            &a[0] * &b[2] + &a[1] * &b[1] + &a[2] * &b[0],
            &a[1] * &b[2] + &a[2] * &b[1],
            &a[2] * &b[2],
        ];
        let mut den = &self.den * &other.den;
        let lead = &poly[3];
        for top in [4, 3] {
            let t = std::mem::take(&mut c[top]);
            if t.is_zero() {
                continue;
            }
            // c₃·tᵗᵒᵖ = −tᵗᵒᵖ⁻³(c₂t² + c₁t + c₀)
            if !lead.is_one() {
                for ci in c[..top].iter_mut() {
                    *ci *= lead;
                }
                den *= lead;
            }
            c[top - 1] -= &t * &poly[2];
            c[top - 2] -= &t * &poly[1];
            c[top - 3] -= &t * &poly[0];
        }
        let [c0, c1, c2, _, _] = c;
        Self::normalized([c0, c1, c2], den)
    }

    fn scale(&self, q: &BigRational) -> Coeffs {
        let num = self.num.clone().map(|n| n * q.numer());
        Self::normalized(num, &self.den * q.denom())
    }
}

/// An element of ℚ(θ) read in the real embedding `θ = θ_root`.
#[derive(Clone)]
pub struct AlgebraicReal {
    field: CubicField,
    root: usize,
    coeffs: Coeffs,
}

impl AlgebraicReal {
    /// `a₀ + a₁θ + a₂θ²`.
    pub fn new(field: &CubicField, root: usize, coeffs: [BigRational; 3]) -> Self {
        assert!(root < 3, "root index {root} out of range");
        AlgebraicReal {
            field: field.clone(),
            root,
            coeffs: Coeffs::from_rationals(&coeffs),
        }
    }

    pub fn from_rational(field: &CubicField, root: usize, q: BigRational) -> Self {
        assert!(root < 3, "root index {root} out of range");
        AlgebraicReal {
            field: field.clone(),
            root,
            coeffs: Coeffs::rational(&q),
        }
    }

    pub fn from_integer(field: &CubicField, root: usize, n: i64) -> Self {
        Self::from_rational(field, root, BigRational::from_integer(n.into()))
    }

    pub fn generator(field: &CubicField, root: usize) -> Self {
        let one = BigRational::one;
        Self::new(field, root, [BigRational::zero(), one(), BigRational::zero()])
    }

    pub fn field(&self) -> &CubicField {
        &self.field
    }

    pub fn root_index(&self) -> usize {
        self.root
    }

    /// Reduced coefficients `(a₀, a₁, a₂)`.
    pub fn coeffs(&self) -> [BigRational; 3] {
        self.coeffs.rationals()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.is_rational()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.coeffs.num[0].clone(), self.coeffs.den.clone()))
    }

    /// The same field element read in another real embedding.
    pub fn conjugate(&self, root: usize) -> Self {
        assert!(root < 3, "root index {root} out of range");
        AlgebraicReal {
            field: self.field.clone(),
            root,
            coeffs: self.coeffs.clone(),
        }
    }

    fn with_coeffs(&self, coeffs: Coeffs) -> Self {
        AlgebraicReal {
            field: self.field.clone(),
            root: self.root,
            coeffs,
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            self.root == other.root && self.field.same_field(&other.field),
            "mixing elements of different fields or embeddings"
        );
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.with_coeffs(self.coeffs.scale(q))
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        self.with_coeffs(self.coeffs.add(&Coeffs::rational(q)))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.with_coeffs(Coeffs::rational(&q.recip())));
        }
        let modulus = QPoly::from_ints(self.field.ascending());
        let a = QPoly::new(self.coeffs.rationals().to_vec());
        let inv = a
            .inverse_mod(&modulus)
            .expect("nonzero element of a field is invertible");
        let mut c = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
        for (slot, v) in c.iter_mut().zip(inv.coeffs()) {
            *slot = v.clone();
        }
        Ok(self.with_coeffs(Coeffs::from_rationals(&c)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.check_compatible(rhs);
        Ok(self * &rhs.inv()?)
    }

    /// Integer interval `[lo, hi]` and positive scale `q` with the value in
    /// `[lo/q, hi/q]`, using the cached enclosure at `level`.
    fn scaled_interval(&self, level: usize) -> (BigInt, BigInt, BigInt) {
        let r = self.field.root_enclosure(self.root, level);
        let s: BigInt = BigInt::one() << r.bits;
        let (l, h) = (&r.lo, &r.hi);
        let [n0, n1, n2] = &self.coeffs.num;
        let (sq_lo, sq_hi) = if !l.is_negative() {
            (l * l, h * h)
        } else if !h.is_positive() {
            (h * h, l * l)
        } else {
            (BigInt::zero(), (l * l).max(h * h))
        };
        let lin = scaled(&(n1 * &s), l, h);
        let quad = scaled(n2, &sq_lo, &sq_hi);
        let c = n0 * &s * &s;
        let lo = &c + lin.0 + quad.0;
        let hi = c + lin.1 + quad.1;
        (lo, hi, &self.coeffs.den * &s * &s)
    }

    /// Rational enclosure of width roughly `2^-bits` times the element's size.
    pub fn enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q);
        }
        let mut level = 0;
        while FIRST_BITS << level < bits {
            level += 1;
        }
        let (lo, hi, q) = self.scaled_interval(level);
        (BigRational::new(lo, q.clone()), BigRational::new(hi, q))
    }

    /// Exact sign. Terminates for every element: zero is detected from the
    /// coefficients, anything else is eventually separated from 0.
    pub fn sign(&self) -> Sign {
        if self.is_rational() {
            return self.coeffs.num[0].sign();
        }
        for level in 0.. {
            let (lo, hi, _) = self.scaled_interval(level);
            if lo.is_positive() {
                return Sign::Plus;
            }
            if hi.is_negative() {
                return Sign::Minus;
            }
        }
        unreachable!()
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Plus
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Minus
    }

    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        for level in 0.. {
            let (lo, hi, q) = self.scaled_interval(level);
            let (a, b) = (lo.div_floor(&q), hi.div_floor(&q));
            if a == b {
                return a;
            }
        }
        unreachable!()
    }

    /// Exact comparison; both sides must live in the same embedding.
    pub fn compare(&self, other: &Self) -> Ordering {
        self.check_compatible(other);
        if self.coeffs == other.coeffs {
            return Ordering::Equal;
        }
        match (self - other).sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// Decimal rounded half-up at `digits` places, exactly.
    pub fn to_decimal(&self, digits: u32) -> String {
        let pow = BigRational::from_integer(BigInt::from(10).pow(digits));
        let half = BigRational::new(1.into(), 2.into());
        let n = self.scale(&pow).add_rational(&half).floor();
        format_fixed(&n, digits)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let (lo, hi) = self.enclosure(64);
        ((lo + hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

const FIRST_BITS: u64 = super::FIRST_LEVEL_BITS;

fn scaled(k: &BigInt, lo: &BigInt, hi: &BigInt) -> (BigInt, BigInt) {
    if k.is_negative() {
        (k * hi, k * lo)
    } else {
        (k * lo, k * hi)
    }
}

/// Formats `n / 10^digits` with exactly `digits` fractional places.
pub(crate) fn format_fixed(n: &BigInt, digits: u32) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let digits = digits as usize;
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.field.same_field(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraicReal {}

impl Hash for AlgebraicReal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for AlgebraicReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.root == other.root && self.field.same_field(&other.field)).then(|| self.compare(other))
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2] = self.coeffs();
        write!(f, "({a0}) + ({a1})θ{} + ({a2})θ{}² ≈ {}", self.root, self.root, self.to_f64())
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2] = self.coeffs();
        write!(f, "{a0} + {a1}*t + {a2}*t^2")
    }
}

impl<'a> Add<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn add(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.check_compatible(rhs);
        self.with_coeffs(self.coeffs.add(&rhs.coeffs))
    }
}

impl<'a> Sub<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn sub(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.check_compatible(rhs);
        self.with_coeffs(self.coeffs.add(&rhs.coeffs.neg()))
    }
}

impl<'a> Mul<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn mul(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.check_compatible(rhs);
        self.with_coeffs(self.coeffs.mul(&rhs.coeffs, self.field.ascending()))
    }
}

impl Neg for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn neg(self) -> AlgebraicReal {
        self.with_coeffs(self.coeffs.neg())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<AlgebraicReal> for AlgebraicReal {
            type Output = AlgebraicReal;
            fn $m(self, rhs: AlgebraicReal) -> AlgebraicReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a AlgebraicReal> for AlgebraicReal {
            type Output = AlgebraicReal;
            fn $m(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<AlgebraicReal> for &'a AlgebraicReal {
            type Output = AlgebraicReal;
            fn $m(self, rhs: AlgebraicReal) -> AlgebraicReal {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicReal {
    type Output = AlgebraicReal;
    fn neg(self) -> AlgebraicReal {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> CubicField {
        CubicField::from_coeffs([1, 0, -4, 1]).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn elem(k: &CubicField, root: usize, c: [i64; 3]) -> AlgebraicReal {
        AlgebraicReal::new(k, root, c.map(|x| q(x, 1)))
    }

    #[test]
    fn addition() {
        let k = field();
        let a = elem(&k, 0, [1, 1, 0]);
        let b = elem(&k, 0, [2, -1, 0]);
        assert_eq!(&a + &b, k.integer(0, 3));
    }

    #[test]
    fn reduction_by_minimal_polynomial() {
        let k = field();
        let t = k.generator(1);
        let t2 = t.square();
        assert_eq!(&t * &t2, elem(&k, 1, [-1, 4, 0]));
        // θ⁴ = 4θ² − θ
        assert_eq!(&t2 * &t2, elem(&k, 1, [0, -1, 4]));
    }

    #[test]
    fn inverse_round_trip() {
        let k = field();
        let t = k.generator(2);
        assert_eq!(&t.inv().unwrap() * &t, k.integer(2, 1));
        let a = elem(&k, 2, [3, -7, 2]);
        assert_eq!(a.checked_div(&a).unwrap(), k.integer(2, 1));
    }

    #[test]
    fn division_by_zero() {
        let k = field();
        assert_eq!(k.integer(0, 0).inv().unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn signs() {
        let k = field();
        assert_eq!(k.integer(0, 0).sign(), Sign::NoSign);
        assert_eq!((k.generator(2) - k.integer(2, 1)).sign(), Sign::Plus);
        assert_eq!(k.generator(0).sign(), Sign::Minus);
        assert_eq!(k.generator(1).sign(), Sign::Plus);
    }

    #[test]
    fn floors() {
        let k = field();
        assert_eq!(k.rational(0, q(7, 2)).floor(), BigInt::from(3));
        assert_eq!(k.rational(0, q(-1, 2)).floor(), BigInt::from(-1));
        assert_eq!(k.generator(2).floor(), BigInt::from(1));
        assert_eq!(k.generator(0).floor(), BigInt::from(-3));
        assert_eq!(k.integer(1, 5).floor(), BigInt::from(5));
    }

    #[test]
    fn comparisons() {
        let k = field();
        let t = k.generator(2);
        assert_eq!(t.compare(&t.clone()), Ordering::Equal);
        assert_eq!(t.square().compare(&t), Ordering::Greater);
        assert_eq!(k.integer(2, 0).compare(&k.integer(2, 1)), Ordering::Less);
    }

    #[test]
    fn decimals() {
        let k = field();
        assert_eq!(k.generator(2).to_decimal(10), "1.8608058531");
        assert_eq!(k.generator(0).to_decimal(5), "-2.11491");
        assert_eq!(k.rational(0, q(1, 8)).to_decimal(2), "0.13");
        assert_eq!(format_fixed(&BigInt::from(-5), 3), "-0.005");
        assert_eq!(format_fixed(&BigInt::from(12), 0), "12");
    }
}
