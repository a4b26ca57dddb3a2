//! Exact arithmetic in totally-real cubic fields.
//!
//! A [`CubicField`] is an irreducible integer cubic together with certified
//! isolating intervals for its three real roots. Elements are
//! [`AlgebraicReal`]s: a coefficient vector over the power basis `(1, θ, θ²)`
//! plus the index of the real embedding `θ ↦ θᵢ` they are read in. Zero tests
//! are exact (coefficient identity); signs and floors of nonzero elements are
//! decided by refining the root enclosure until interval evaluation is
//! conclusive.
//!
//! [`CofactorCtx`] adjoins a root `η` of the quadratic `p(t)/(t − θᵢ)`, so
//! quantities that are symmetric in the two remaining conjugates can be
//! computed exactly and brought back into ℚ(θᵢ).

mod cofactor;
mod elem;
mod poly;
mod qpoly;

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use cofactor::{CofactorCtx, CofactorElem};
pub use elem::AlgebraicReal;
pub use poly::{CubicPolynomial, DyadicRoot, RootIsolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("leading coefficient is zero")]
    NotCubic,
    #[error("polynomial is reducible over Q (rational root {root})")]
    ReduciblePolynomial { root: BigRational },
    #[error("polynomial is not totally real (discriminant {discriminant})")]
    NotTotallyReal { discriminant: BigInt },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cofactor-extension element is not Galois-symmetric")]
    NotSymmetric,
    #[error("root index {0} out of range")]
    BadRootIndex(usize),
}

/// Width of the first cached root enclosure is `2^-FIRST_LEVEL_BITS`; each
/// further level doubles the bit count.
const FIRST_LEVEL_BITS: u64 = 32;

struct FieldInner {
    poly: CubicPolynomial,
    ascending: [BigInt; 4],
    discriminant: BigInt,
    isolation: RootIsolation,
    /// `levels[i][k]` encloses root `i` with width at most `2^-(32·2^k)`.
    levels: Mutex<[Vec<DyadicRoot>; 3]>,
}

/// Totally-real cubic field with its three real embeddings, ascending.
#[derive(Clone)]
pub struct CubicField(Arc<FieldInner>);

impl CubicField {
    pub fn new(poly: CubicPolynomial) -> Result<Self, FieldError> {
        if let Some(root) = poly.rational_root() {
            return Err(FieldError::ReduciblePolynomial { root });
        }
        let discriminant = poly.discriminant();
        if discriminant <= BigInt::from(0) {
            return Err(FieldError::NotTotallyReal { discriminant });
        }
        let isolation = poly.isolate()?;
        debug_assert_eq!(isolation.len(), 3);
        let mut first: Vec<DyadicRoot> = isolation.roots().to_vec();
        for r in first.iter_mut() {
            r.refine_to(&poly, FIRST_LEVEL_BITS)
                .expect("irreducible cubic has no rational root");
        }
        let levels = [vec![first[0].clone()], vec![first[1].clone()], vec![first[2].clone()]];
        Ok(CubicField(Arc::new(FieldInner {
            ascending: poly.ascending(),
            poly,
            discriminant,
            isolation,
            levels: Mutex::new(levels),
        })))
    }

    /// Builds the field of `c₃t³ + c₂t² + c₁t + c₀`.
    pub fn from_coeffs(coeffs: [i64; 4]) -> Result<Self, FieldError> {
        Self::new(CubicPolynomial::from_i64(coeffs)?)
    }

    pub fn polynomial(&self) -> &CubicPolynomial {
        &self.0.poly
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.0.discriminant
    }

    /// The isolating intervals found at construction.
    pub fn isolation(&self) -> &RootIsolation {
        &self.0.isolation
    }

    pub(crate) fn ascending(&self) -> &[BigInt; 4] {
        &self.0.ascending
    }

    /// Enclosure of root `root` of width at most `2^-(32·2^level)`.
    pub fn root_enclosure(&self, root: usize, level: usize) -> DyadicRoot {
        let mut levels = self.0.levels.lock().expect("root cache poisoned");
        let cache = &mut levels[root];
        while cache.len() <= level {
            let mut next = cache.last().unwrap().clone();
            let bits = FIRST_LEVEL_BITS << cache.len();
            next.refine_to(&self.0.poly, bits)
                .expect("irreducible cubic has no rational root");
            cache.push(next);
        }
        cache[level].clone()
    }

    /// Enclosure of root `root` of width at most `2^-bits`.
    pub fn root_interval(&self, root: usize, bits: u64) -> (BigRational, BigRational) {
        let mut level = 0;
        while FIRST_LEVEL_BITS << level < bits {
            level += 1;
        }
        let r = self.root_enclosure(root, level);
        (r.lo(), r.hi())
    }

    pub fn same_field(&self, other: &CubicField) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.poly == other.0.poly
    }

    /// The generator `θᵢ`.
    pub fn generator(&self, root: usize) -> AlgebraicReal {
        AlgebraicReal::generator(self, root)
    }

    pub fn rational(&self, root: usize, q: BigRational) -> AlgebraicReal {
        AlgebraicReal::from_rational(self, root, q)
    }

    pub fn integer(&self, root: usize, n: i64) -> AlgebraicReal {
        AlgebraicReal::from_integer(self, root, n)
    }

    /// The quadratic extension by a root of `p(t)/(t − θ_root)`.
    pub fn cofactor(&self, root: usize) -> Arc<CofactorCtx> {
        Arc::new(CofactorCtx::new(self, root))
    }
}

impl std::fmt::Debug for CubicField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("CubicField").field(&self.0.poly.to_string()).finish()
    }
}
