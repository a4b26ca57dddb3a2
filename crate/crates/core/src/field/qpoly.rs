//! Dense univariate polynomials over ℚ, only as much as root isolation and
//! field inversion need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending degree order, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct QPoly(Vec<BigRational>);

impl QPoly {
    pub(crate) fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub(crate) fn from_ints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub(crate) fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub(crate) fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub(crate) fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub(crate) fn neg(&self) -> Self {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    pub(crate) fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub(crate) fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
        let lead = divisor.lead().clone();
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub(crate) fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd.
    pub(crate) fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.lead().clone();
        QPoly(a.0.iter().map(|c| c / &lead).collect())
    }

    /// Inverse of `self` modulo `modulus`, if they are coprime.
    pub(crate) fn inverse_mod(&self, modulus: &Self) -> Option<Self> {
        // Invariant: s * self ≡ r (mod modulus).
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (QPoly(Vec::new()), QPoly(vec![BigRational::one()]));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let c = r0.0[0].clone();
        Some(QPoly(s0.0.iter().map(|x| x / &c).collect()).rem(modulus))
    }

    /// Positive multiple with integer coefficients; same sign everywhere.
    pub(crate) fn integer_multiple(&self) -> Vec<BigInt> {
        let den = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.0
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect()
    }
}

/// Sign of `Σ coeffs[i] · (m / 2^bits)^i`, coefficients ascending.
pub(crate) fn sign_at_dyadic(coeffs: &[BigInt], m: &BigInt, bits: u64) -> i32 {
    let Some(deg) = coeffs.len().checked_sub(1) else {
        return 0;
    };
    let scale: BigInt = BigInt::one() << bits;
    // Horner on 2^(bits·deg) · p(m / 2^bits).
    let mut acc = coeffs[deg].clone();
    let mut pow = BigInt::one();
    for c in coeffs[..deg].iter().rev() {
        pow *= &scale;
        acc = acc * m + c * &pow;
    }
    signum(&acc)
}

pub(crate) fn signum(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn poly(c: &[i64]) -> QPoly {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = poly(&[1, -4, 0, 1]);
        let b = poly(&[3, 1]);
        let (quo, rem) = a.div_rem(&b);
        assert!(rem.degree().unwrap_or(0) < 1);
        assert_eq!(quo.mul(&b).sub(&rem.neg()), a);
    }

    #[test]
    fn inverse_mod_cubic() {
        let p = poly(&[1, -4, 0, 1]);
        let t = poly(&[0, 1]);
        let inv = t.inverse_mod(&p).unwrap();
        assert_eq!(inv.mul(&t).rem(&p), poly(&[1]));
    }

    #[test]
    fn gcd_detects_common_factor() {
        // (t - 1)^2 (t + 2)
        let p = poly(&[2, -3, 0, 1]);
        let g = p.gcd(&p.derivative());
        assert_eq!(g, poly(&[-1, 1]));
    }

    #[test]
    fn dyadic_sign() {
        let c: Vec<BigInt> = [1, -4, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        // p(1/4) = 1/64 > 0, p(1/2) = -7/8 < 0
        assert_eq!(sign_at_dyadic(&c, &BigInt::from(1), 2), 1);
        assert_eq!(sign_at_dyadic(&c, &BigInt::from(1), 1), -1);
        assert_eq!(sign_at_dyadic(&c, &BigInt::from(-1), 0), 1);
    }
}
