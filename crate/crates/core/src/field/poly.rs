use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qpoly::{sign_at_dyadic, QPoly};
use super::FieldError;

/// Integer cubic `c₃t³ + c₂t² + c₁t + c₀`, stored primitive with `c₃ > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicPolynomial {
    /// `[c₃, c₂, c₁, c₀]`
    coeffs: [BigInt; 4],
}

impl CubicPolynomial {
    pub fn new(coeffs: [BigInt; 4]) -> Result<Self, FieldError> {
        if coeffs[0].is_zero() {
            return Err(FieldError::NotCubic);
        }
        let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let content = if coeffs[0].is_negative() { -content } else { content };
        Ok(CubicPolynomial {
            coeffs: coeffs.map(|c| c / &content),
        })
    }

    pub fn from_i64(coeffs: [i64; 4]) -> Result<Self, FieldError> {
        Self::new(coeffs.map(BigInt::from))
    }

    /// `[c₃, c₂, c₁, c₀]`, high degree first.
    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.coeffs
    }

    pub(crate) fn ascending(&self) -> [BigInt; 4] {
        let [c3, c2, c1, c0] = self.coeffs.clone();
        [c0, c1, c2, c3]
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn discriminant(&self) -> BigInt {
        let [a, b, c, d] = &self.coeffs;
        b * b * c * c - BigInt::from(4) * a * c * c * c - BigInt::from(4) * b * b * b * d
            - BigInt::from(27) * a * a * d * d
            + BigInt::from(18) * a * b * c * d
    }

    pub fn is_totally_real(&self) -> bool {
        self.discriminant().is_positive()
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .fold(BigRational::zero(), |acc, c| acc * t + BigRational::from_integer(c.clone()))
    }

    fn qpoly(&self) -> QPoly {
        QPoly::from_ints(&self.ascending())
    }

    /// A rational root if one exists. Complete for cubics: a cubic is
    /// reducible over ℚ exactly when it has a rational root.
    pub fn rational_root(&self) -> Option<BigRational> {
        if self.coeffs[3].is_zero() {
            return Some(BigRational::zero());
        }
        if self.discriminant().is_zero() {
            // The repeated factor gcd(p, p') has rational coefficients.
            let p = self.qpoly();
            let g = p.gcd(&p.derivative());
            return match g.degree() {
                Some(1) => Some(-g.coeffs()[0].clone() / g.coeffs()[1].clone()),
                Some(2) => {
                    // g = (t - r)^2
                    Some(-g.coeffs()[1].clone() / BigRational::from_integer(2.into()))
                }
                _ => unreachable!("zero discriminant implies a repeated root"),
            };
        }
        let mut roots = match isolate_real_roots(self) {
            Ok(roots) => roots,
            Err(root) => return Some(root),
        };
        // A root p/q in lowest terms has q | c₃; an enclosure narrower than 1/q
        // holds at most two candidates with that denominator.
        for q in positive_divisors(self.leading()) {
            let bits = q.bits() + 1;
            for root in roots.iter_mut() {
                if let Err(r) = root.refine_to(self, bits) {
                    return Some(r);
                }
                let lo = (root.lo.clone() * &q).div_floor(&(BigInt::one() << root.bits));
                let hi = (root.hi.clone() * &q).div_ceil(&(BigInt::one() << root.bits));
                let mut p = lo;
                while p <= hi {
                    let cand = BigRational::new(p.clone(), q.clone());
                    if self.eval(&cand).is_zero() {
                        return Some(cand);
                    }
                    p += 1;
                }
            }
        }
        None
    }

    /// Isolating intervals of the real roots, ascending.
    pub fn isolate(&self) -> Result<RootIsolation, FieldError> {
        if self.discriminant().is_zero() {
            return Err(FieldError::ReduciblePolynomial {
                root: self.rational_root().expect("repeated root is rational"),
            });
        }
        isolate_real_roots(self)
            .map(|roots| RootIsolation { roots })
            .map_err(|root| FieldError::ReduciblePolynomial { root })
    }
}

impl fmt::Display for CubicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let deg = 3 - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if !mag.is_one() || deg == 0 {
                write!(f, "{mag}")?;
            }
            match deg {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{deg}")?,
            }
        }
        Ok(())
    }
}

/// An open interval `(lo/2^bits, hi/2^bits)` holding exactly one simple
/// real root, with the polynomial nonzero at both endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicRoot {
    pub(crate) lo: BigInt,
    pub(crate) hi: BigInt,
    pub(crate) bits: u64,
    /// Sign of the polynomial at `lo`.
    pub(crate) sign_lo: i32,
}

impl DyadicRoot {
    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    /// Bisects until the width is at most `2^-bits`. An exact rational root
    /// hit on the way is returned as the error value.
    pub(crate) fn refine_to(&mut self, poly: &CubicPolynomial, bits: u64) -> Result<(), BigRational> {
        let coeffs = poly.ascending();
        loop {
            let width = &self.hi - &self.lo;
            if self.bits >= bits && width <= BigInt::one() {
                return Ok(());
            }
            if width.is_odd() || width.is_one() {
                self.lo <<= 1;
                self.hi <<= 1;
                self.bits += 1;
                continue;
            }
            let mid: BigInt = (&self.lo + &self.hi) >> 1;
            match sign_at_dyadic(&coeffs, &mid, self.bits) {
                0 => return Err(BigRational::new(mid, BigInt::one() << self.bits)),
                s if s == self.sign_lo => self.lo = mid,
                _ => self.hi = mid,
            }
        }
    }
}

/// Disjoint isolating intervals for the real roots, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootIsolation {
    roots: Vec<DyadicRoot>,
}

impl RootIsolation {
    pub fn roots(&self) -> &[DyadicRoot] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Sturm chain of a squarefree polynomial, each scaled to integer
/// coefficients by a positive factor.
fn sturm_chain(p: &QPoly) -> Vec<Vec<BigInt>> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
    }
    chain.iter().map(QPoly::integer_multiple).collect()
}

fn sign_variations(chain: &[Vec<BigInt>], m: &BigInt, bits: u64) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|c| sign_at_dyadic(c, m, bits))
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Power of two strictly above the Cauchy bound `1 + max |cᵢ/c₃|`.
fn cauchy_exponent(poly: &CubicPolynomial) -> u64 {
    let [c3, rest @ ..] = poly.coeffs();
    let max = rest.iter().map(|c| c.abs()).max().unwrap();
    let bound = max.div_ceil(&c3.abs()) + 2u32;
    bound.bits()
}

/// Sturm bisection on `(-2^e, 2^e]`. Requires a nonzero discriminant.
fn isolate_real_roots(poly: &CubicPolynomial) -> Result<Vec<DyadicRoot>, BigRational> {
    let chain = sturm_chain(&poly.qpoly());
    let coeffs = poly.ascending();
    let e = cauchy_exponent(poly);
    let bound = BigInt::one() << e;
    let mut pending = vec![(-bound.clone(), bound, 0u64)];
    let mut found = Vec::new();
    while let Some((lo, hi, bits)) = pending.pop() {
        let count = sign_variations(&chain, &lo, bits) - sign_variations(&chain, &hi, bits);
        match count {
            0 => {}
            1 => {
                let sign_lo = sign_at_dyadic(&coeffs, &lo, bits);
                debug_assert!(sign_lo != 0 && sign_at_dyadic(&coeffs, &hi, bits) == -sign_lo);
                found.push(DyadicRoot { lo, hi, bits, sign_lo })
            }
            _ => {
                let (lo, hi, bits) = (lo << 1, hi << 1, bits + 1);
                let mid: BigInt = (&lo + &hi) >> 1;
                if sign_at_dyadic(&coeffs, &mid, bits) == 0 {
                    return Err(BigRational::new(mid, BigInt::one() << bits));
                }
                pending.push((lo, mid.clone(), bits));
                pending.push((mid, hi, bits));
            }
        }
    }
    found.sort_by_key(|r| r.lo());
    Ok(found)
}
