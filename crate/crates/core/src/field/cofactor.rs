use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;

use super::{AlgebraicReal, CubicField, FieldError};

/// ℚ(θ)[η] with `η² + Aη + B = 0`, where `t² + At + B = p(t)/(c₃(t − θ))`.
/// The two roots of the cofactor are the remaining conjugates of θ.
#[derive(Debug)]
pub struct CofactorCtx {
    /// Coefficient of `t` in the cofactor; `η + η' = −A`.
    a: AlgebraicReal,
    /// Constant term; `ηη' = B`.
    b: AlgebraicReal,
}

impl CofactorCtx {
    pub(super) fn new(field: &CubicField, root: usize) -> Self {
        let [c3, c2, c1, _] = field.polynomial().coeffs();
        let m2 = BigRational::new(c2.clone(), c3.clone());
        let m1 = BigRational::new(c1.clone(), c3.clone());
        let theta = field.generator(root);
        let a = theta.add_rational(&m2);
        let b = (&theta * &a).add_rational(&m1);
        CofactorCtx { a, b }
    }

    /// Coefficient of `t` in `t² + At + B`.
    pub fn linear_coeff(&self) -> &AlgebraicReal {
        &self.a
    }

    pub fn constant_coeff(&self) -> &AlgebraicReal {
        &self.b
    }
}

/// `u₀ + u₁η` with `u₀, u₁ ∈ ℚ(θ)`.
#[derive(Clone, Debug)]
pub struct CofactorElem {
    ctx: Arc<CofactorCtx>,
    pub u0: AlgebraicReal,
    pub u1: AlgebraicReal,
}

impl CofactorElem {
    pub fn new(ctx: &Arc<CofactorCtx>, u0: AlgebraicReal, u1: AlgebraicReal) -> Self {
        CofactorElem { ctx: ctx.clone(), u0, u1 }
    }

    pub fn from_base(ctx: &Arc<CofactorCtx>, u0: AlgebraicReal) -> Self {
        let u1 = AlgebraicReal::from_integer(u0.field(), u0.root_index(), 0);
        Self::new(ctx, u0, u1)
    }

    pub fn eta(ctx: &Arc<CofactorCtx>) -> Self {
        let zero = AlgebraicReal::from_integer(ctx.a.field(), ctx.a.root_index(), 0);
        let one = zero.add_rational(&BigRational::from_integer(1.into()));
        Self::new(ctx, zero, one)
    }

    /// `η' = −A − η`, the other root of the cofactor.
    pub fn eta_conj(ctx: &Arc<CofactorCtx>) -> Self {
        Self::eta(ctx).conj()
    }

    /// Evaluates the coefficient polynomial of `x` at η instead of θ, i.e. the
    /// image of `x` under the embedding that sends θ to a conjugate.
    pub fn lift(ctx: &Arc<CofactorCtx>, x: &AlgebraicReal) -> Self {
        let [a0, a1, a2] = x.coeffs();
        let k = x.field();
        let root = ctx.a.root_index();
        let c0 = k.rational(root, a0);
        let c1 = k.rational(root, a1);
        // a₂η² = −a₂Aη − a₂B
        let u0 = &c0 - &ctx.b.scale(&a2);
        let u1 = &c1 - &ctx.a.scale(&a2);
        Self::new(ctx, u0, u1)
    }

    /// Swaps the two roots of the cofactor.
    pub fn conj(&self) -> Self {
        let u0 = &self.u0 - &(&self.ctx.a * &self.u1);
        Self::new(&self.ctx, u0, -&self.u1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.u1.is_zero()
    }

    /// The ℚ(θ) value of a Galois-symmetric element.
    pub fn symmetric_part(&self) -> Result<AlgebraicReal, FieldError> {
        if self.is_symmetric() {
            Ok(self.u0.clone())
        } else {
            Err(FieldError::NotSymmetric)
        }
    }

    /// `x · x'`, which always lies in ℚ(θ).
    pub fn norm(&self) -> AlgebraicReal {
        (self * &self.conj())
            .symmetric_part()
            .expect("norm is symmetric by construction")
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let n = self.norm().inv()?;
        let c = self.conj();
        Ok(Self::new(&self.ctx, &c.u0 * &n, &c.u1 * &n))
    }

    pub fn is_zero(&self) -> bool {
        self.u0.is_zero() && self.u1.is_zero()
    }
}

impl<'a> Add<&'a CofactorElem> for &'a CofactorElem {
    type Output = CofactorElem;
    fn add(self, rhs: &'a CofactorElem) -> CofactorElem {
        CofactorElem::new(&self.ctx, &self.u0 + &rhs.u0, &self.u1 + &rhs.u1)
    }
}

impl<'a> Sub<&'a CofactorElem> for &'a CofactorElem {
    type Output = CofactorElem;
    fn sub(self, rhs: &'a CofactorElem) -> CofactorElem {
        CofactorElem::new(&self.ctx, &self.u0 - &rhs.u0, &self.u1 - &rhs.u1)
    }
}

impl<'a> Mul<&'a CofactorElem> for &'a CofactorElem {
    type Output = CofactorElem;
    fn mul(self, rhs: &'a CofactorElem) -> CofactorElem {
        // (u₀ + u₁η)(v₀ + v₁η) with η² = −Aη − B
        let p00 = &self.u0 * &rhs.u0;
        let p11 = &self.u1 * &rhs.u1;
        let cross = &(&self.u0 * &rhs.u1) + &(&self.u1 * &rhs.u0);
        let u0 = &p00 - &(&self.ctx.b * &p11);
        let u1 = &cross - &(&self.ctx.a * &p11);
        CofactorElem::new(&self.ctx, u0, u1)
    }
}

impl Neg for &CofactorElem {
    type Output = CofactorElem;
    fn neg(self) -> CofactorElem {
        CofactorElem::new(&self.ctx, -&self.u0, -&self.u1)
    }
}
