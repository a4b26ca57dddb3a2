//! Outward-rounded `f64` intervals, used only to discard candidates whose
//! exact comparison could not change a result.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::field::AlgebraicReal;
use crate::transforms::Scalable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Iv {
    pub lo: f64,
    pub hi: f64,
}

/// IEEE operations are correctly rounded, so one ulp outward is enough.
fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

impl Iv {
    pub fn entire() -> Self {
        Iv {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    fn checked(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            Self::entire()
        } else {
            Iv { lo, hi }
        }
    }

    pub fn exact(k: u64) -> Self {
        Iv {
            lo: down(k as f64),
            hi: up(k as f64),
        }
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Self {
        // conversion may be off by an ulp; step two outward
        match (lo.to_f64(), hi.to_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => Iv {
                lo: down(down(a)),
                hi: up(up(b)),
            },
            _ => Self::entire(),
        }
    }

    pub fn of(x: &AlgebraicReal) -> Self {
        let (lo, hi) = x.enclosure(64);
        Self::from_rationals(&lo, &hi)
    }

    pub fn div(&self, rhs: &Iv) -> Iv {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Self::entire();
        }
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::checked(down(lo), up(hi))
    }

    /// `⌊x⌋` if both endpoints agree.
    pub fn floor(&self) -> Option<f64> {
        let (a, b) = (self.lo.floor(), self.hi.floor());
        (a == b && a.is_finite()).then_some(a)
    }
}

impl Add for &Iv {
    type Output = Iv;
    fn add(self, rhs: &Iv) -> Iv {
        Iv::checked(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for &Iv {
    type Output = Iv;
    fn sub(self, rhs: &Iv) -> Iv {
        Iv::checked(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Mul for &Iv {
    type Output = Iv;
    fn mul(self, rhs: &Iv) -> Iv {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        if c.iter().any(|v| v.is_nan()) {
            return Iv::entire();
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Iv::checked(down(lo), up(hi))
    }
}

impl Scalable for Iv {
    fn times(&self, k: u64) -> Self {
        self * &Iv::exact(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CubicField;

    #[test]
    fn encloses_exact_values() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let t = k.generator(2);
        let it = Iv::of(&t);
        assert!(it.lo < 1.86080585311171 && 1.86080585311170 < it.hi && it.hi - it.lo < 1e-14);
        let sq = &it * &it;
        let exact = Iv::of(&t.square());
        assert!(sq.lo <= exact.lo && exact.hi <= sq.hi);
        let q = Iv::from_rationals(&BigRational::new(1.into(), 3.into()), &BigRational::new(1.into(), 3.into()));
        let three = q.times(3);
        assert!(three.lo < 1.0 && 1.0 < three.hi);
        assert_eq!((&q - &q).floor(), None);
        assert_eq!(Iv { lo: 2.1, hi: 2.9 }.floor(), Some(2.0));
        assert_eq!(Iv { lo: 1.0, hi: 2.0 }.div(&Iv { lo: -1.0, hi: 1.0 }), Iv::entire());
    }
}
