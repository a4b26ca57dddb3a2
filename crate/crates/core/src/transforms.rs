//! JP-transformations, admissible sets, the exact sin² of the angle between
//! the planes (ξ, ν₁) and (ξ, ν₂), and the Φ step.
//!
//! Basis matrices carry the new basis vectors as columns, so composing
//! steps is right multiplication and new coordinates are `M⁻¹·old`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::field::{AlgebraicReal, CofactorCtx, CofactorElem, FieldError};
use crate::interval::Iv;
use crate::matrix::IntMatrix3;
use crate::states::{CubicState, StateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("coordinates of xi are not positive and sorted non-increasing")]
    NotSorted,
    #[error("degenerate state: the three vectors are not independent")]
    DegenerateState,
    #[error("admissible set is empty")]
    EmptyAdmissibleSet,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JPTransform {
    /// `(e₁, e₂ + γe₁, e₃ + αe₁ + βe₂)`
    V { alpha: u64, beta: u64, gamma: u64 },
    /// `(e₁ + e₃, e₂ + e₁, e₃)`
    W,
    /// Column `j` of the new basis is old basis vector `order[j]`.
    T { order: [usize; 3] },
}

impl JPTransform {
    pub fn matrix(&self) -> IntMatrix3 {
        match *self {
            JPTransform::V { alpha, beta, gamma } => {
                let (a, b, g) = (alpha as i64, beta as i64, gamma as i64);
                IntMatrix3::from_rows([[1, g, a], [0, 1, b], [0, 0, 1]])
            }
            JPTransform::W => IntMatrix3::from_rows([[1, 1, 0], [0, 1, 0], [1, 0, 1]]),
            JPTransform::T { order } => IntMatrix3::permutation(order),
        }
    }

    /// Coordinates of the same vector in the transformed basis.
    pub fn apply_to_coords<T>(&self, v: &[T; 3]) -> [T; 3]
    where
        T: Clone + Scalable,
        for<'a> &'a T: Sub<&'a T, Output = T>,
    {
        let [x, y, z] = v;
        match *self {
            JPTransform::V { alpha, beta, gamma } => {
                let y1 = y - &z.times(beta);
                let x1 = &(x - &z.times(alpha)) - &y1.times(gamma);
                [x1, y1, z.clone()]
            }
            JPTransform::W => {
                let d = x - y;
                let z1 = z - &d;
                [d, y.clone(), z1]
            }
            JPTransform::T { order } => order.map(|i| v[i].clone()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            JPTransform::V { .. } => "V",
            JPTransform::W => "W",
            JPTransform::T { .. } => "T",
        }
    }
}

impl fmt::Display for JPTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JPTransform::V { alpha, beta, gamma } => write!(f, "V[{alpha},{beta};{gamma}]"),
            JPTransform::W => write!(f, "W"),
            JPTransform::T { order } => write!(f, "T{order:?}"),
        }
    }
}

/// Multiplication by a small nonnegative integer.
pub trait Scalable {
    fn times(&self, k: u64) -> Self;
}

impl Scalable for AlgebraicReal {
    fn times(&self, k: u64) -> Self {
        self.scale(&num_rational::BigRational::from_integer(BigInt::from(k)))
    }
}

/// `det(a, b, c)`.
pub fn triple_det<T>(a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T
where
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    let bc = cross(b, c);
    dot(a, &bc)
}

fn cross<T>(a: &[T; 3], b: &[T; 3]) -> [T; 3]
where
    for<'x> &'x T: Sub<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn dot<T>(a: &[T; 3], b: &[T; 3]) -> T
where
    for<'x> &'x T: Add<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    let s = &(&a[0] * &b[0]) + &(&a[1] * &b[1]);
    &s + &(&a[2] * &b[2])
}

/// sin² of the angle between span(ξ, ν₁) and span(ξ, ν₂) as a fraction
/// `(det(ξ,ν₁,ν₂)²·|ξ|², |ξ×ν₁|²·|ξ×ν₂|²)`. With normals `nᵢ = ξ×νᵢ`,
/// `n₁×n₂ = det(ξ,ν₁,ν₂)·ξ`, so this is `|n₁×n₂|²/(|n₁|²|n₂|²)`.
pub fn sin2_parts<T>(xi: &[T; 3], nu1: &[T; 3], nu2: &[T; 3]) -> (T, T)
where
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    let det = triple_det(xi, nu1, nu2);
    let num = &(&det * &det) * &dot(xi, xi);
    let n1 = cross(xi, nu1);
    let n2 = cross(xi, nu2);
    let den = &dot(&n1, &n1) * &dot(&n2, &n2);
    (num, den)
}

/// Exact sin²α for ξ with coordinates `v` (any scaling) and its conjugates.
#[derive(Clone, Debug)]
pub struct Sin2Value {
    pub exact: AlgebraicReal,
}

impl Sin2Value {
    pub fn approx(&self, digits: u32) -> String {
        self.exact.to_decimal(digits)
    }
}

/// The numerator and denominator of sin² computed in the cofactor extension,
/// before extracting their ℚ(θ) parts.
pub fn sin2_extension_parts(ctx: &Arc<CofactorCtx>, v: &[AlgebraicReal; 3]) -> (CofactorElem, CofactorElem) {
    let xi = v.clone().map(|c| CofactorElem::from_base(ctx, c));
    let nu1 = v.clone().map(|c| CofactorElem::lift(ctx, &c));
    let nu2 = nu1.clone().map(|c| c.conj());
    sin2_parts(&xi, &nu1, &nu2)
}

pub fn sin2_of_coords(ctx: &Arc<CofactorCtx>, v: &[AlgebraicReal; 3]) -> Result<AlgebraicReal, TransformError> {
    let (num, den) = sin2_extension_parts(ctx, v);
    let num = num.symmetric_part()?;
    let den = den.symmetric_part()?;
    if den.is_zero() || num.is_zero() {
        return Err(TransformError::DegenerateState);
    }
    Ok(num.checked_div(&den)?)
}

pub fn sin2_alpha(s: &CubicState) -> Result<Sin2Value, TransformError> {
    Ok(Sin2Value {
        exact: sin2_of_coords(&s.cofactor(), &s.xi())?,
    })
}

/// Every V with nonnegative parameters other than the identity, and W,
/// whose image keeps all coordinates of ξ strictly positive. V's come in
/// lexicographic order of `(α, β, γ)`, W last.
pub fn enumerate_admissible(s: &CubicState) -> Result<Vec<JPTransform>, TransformError> {
    let one = s.one();
    let (x, y) = (s.x(), s.y());
    if !s.is_sorted_positive() || !one.is_positive() {
        return Err(TransformError::NotSorted);
    }
    let mut out = Vec::new();
    let (ix, iy) = (Iv::of(x), Iv::of(y));
    let alpha_max = strict_floor_below(x);
    let beta_max = strict_floor_below(y);
    for alpha in 0..=alpha_max {
        let xa = x.add_rational(&int(-(alpha as i64)));
        for beta in 0..=beta_max {
            let yb = y.add_rational(&int(-(beta as i64)));
            // x − α − γ(y − β) > 0  ⇔  γ < (x − α)/(y − β)
            let approx = (&ix - &Iv::exact(alpha)).div(&(&iy - &Iv::exact(beta)));
            let gamma_max = match approx.floor() {
                Some(f) if approx.lo > f => f as u64,
                _ => strict_floor_below(&xa.checked_div(&yb)?),
            };
            for gamma in 0..=gamma_max {
                if alpha == 0 && beta == 0 && gamma == 0 {
                    continue;
                }
                out.push(JPTransform::V { alpha, beta, gamma });
            }
        }
    }
    // W iff z > x − y > 0
    let d = x - y;
    if d.is_positive() && one.compare(&d).is_gt() {
        out.push(JPTransform::W);
    }
    Ok(out)
}

/// Largest integer strictly below a positive value.
fn strict_floor_below(v: &AlgebraicReal) -> u64 {
    let f = v.floor();
    let f = if v.is_rational() && v.as_rational().unwrap() == num_rational::BigRational::from_integer(f.clone()) {
        f - 1
    } else {
        f
    };
    u64::try_from(f).expect("coordinates are positive and moderate")
}

fn int(n: i64) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(n.into())
}

/// One application of Φ.
#[derive(Clone, Debug)]
pub struct PhiStep {
    /// The maximizing JP-transformation.
    pub choice: JPTransform,
    /// Sorting transposition applied after `choice`.
    pub sort: JPTransform,
    /// Basis matrix of `T∘M`, i.e. `M·P`.
    pub matrix: IntMatrix3,
    /// sin² of the new state.
    pub sin2: AlgebraicReal,
    /// Number of admissible transformations evaluated.
    pub candidates: usize,
    /// An exact tie for the maximum was broken by enumeration order.
    pub tied: bool,
    pub state: CubicState,
}

/// Picks the admissible transformation maximizing sin²α of the image
/// (first in enumeration order on exact ties) and sorts the resulting
/// coordinates non-increasingly, keeping equal coordinates in place.
pub fn phi_step(s: &CubicState) -> Result<PhiStep, TransformError> {
    phi_step_with(s, true)
}

/// [`phi_step`]; with `prefilter`, candidates whose certified enclosure
/// lies strictly below another candidate's are not evaluated exactly.
/// The result is the same either way.
pub fn phi_step_with(s: &CubicState, prefilter: bool) -> Result<PhiStep, TransformError> {
    let admissible = enumerate_admissible(s)?;
    let ctx = s.cofactor();
    let xi = s.xi();
    let bounds: Vec<Iv> = if prefilter {
        let approx = [xi.clone(), s.nu(0), s.nu(1)].map(|v| v.map(|c| Iv::of(&c)));
        admissible
            .iter()
            .map(|t| {
                let [a, b, c] = approx.map(|v| t.apply_to_coords(&v));
                let (num, den) = sin2_parts(&a, &b, &c);
                num.div(&den)
            })
            .collect()
    } else {
        vec![Iv::entire(); admissible.len()]
    };
    let threshold = bounds.iter().map(|b| b.lo).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<(JPTransform, [AlgebraicReal; 3], AlgebraicReal)> = None;
    let mut tied = false;
    for (t, bound) in admissible.iter().zip(&bounds) {
        if bound.hi < threshold {
            continue;
        }
        let coords = t.apply_to_coords(&xi);
        let value = sin2_of_coords(&ctx, &coords)?;
        match &best {
            None => best = Some((*t, coords, value)),
            Some((_, _, b)) => match value.compare(b) {
                Ordering::Greater => {
                    best = Some((*t, coords, value));
                    tied = false;
                }
                Ordering::Equal => tied = true,
                Ordering::Less => {}
            },
        }
    }
    let (choice, coords, sin2) = best.ok_or(TransformError::EmptyAdmissibleSet)?;
    let order = sorting_order(&coords);
    let sort = JPTransform::T { order };
    let sorted = sort.apply_to_coords(&coords);
    let matrix = &choice.matrix() * &sort.matrix();
    let basis = s.basis() * &matrix;
    let state = s.with_coords(sorted, basis)?;
    Ok(PhiStep {
        choice,
        sort,
        matrix,
        sin2,
        candidates: admissible.len(),
        tied,
        state,
    })
}

/// Indices of `v` in non-increasing order of value; stable for ties.
pub fn sorting_order(v: &[AlgebraicReal; 3]) -> [usize; 3] {
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| v[j].compare(&v[i]));
    order
}

/// Lines ξνᵢ in the plane z = 1 meet the y-axis at `(0, pᵢ, 1)`; returns
/// sin²α as the rational expression in `p₁, p₂, x, y`, or `None` when a
/// line is parallel to the y-axis.
pub fn formula_f(s: &CubicState) -> Result<Option<AlgebraicReal>, TransformError> {
    let ctx = s.cofactor();
    let base = |a: &AlgebraicReal| CofactorElem::from_base(&ctx, a.clone());
    let (x, y) = (base(s.x()), base(s.y()));
    let (x1, y1) = (CofactorElem::lift(&ctx, s.x()), CofactorElem::lift(&ctx, s.y()));
    let dx = &x1 - &x;
    if dx.is_zero() {
        return Ok(None);
    }
    // p = y − x(y₁ − y)/(x₁ − x)
    let p1 = &y - &(&(&x * &(&y1 - &y)) * &dx.inv()?);
    let p2 = p1.conj();
    let one = base(&s.one());
    let dp = &p1 - &p2;
    let x2 = &x * &x;
    let r2 = &(&x2 + &(&y * &y)) + &one;
    let num = &(&(&dp * &dp) * &r2) * &x2;
    let factor = |p: &CofactorElem| {
        let yp = &y - p;
        &(&x2 + &(&x2 * &(p * p))) + &(&yp * &yp)
    };
    let den = &factor(&p1) * &factor(&p2);
    finish_formula(num, den)
}

/// Lines ξνᵢ meet the x-axis at `(qᵢ, 0, 1)`; sin²α in terms of
/// `q₁, q₂, x, y`.
pub fn formula_bar_f(s: &CubicState) -> Result<Option<AlgebraicReal>, TransformError> {
    let ctx = s.cofactor();
    let base = |a: &AlgebraicReal| CofactorElem::from_base(&ctx, a.clone());
    let (x, y) = (base(s.x()), base(s.y()));
    let (x1, y1) = (CofactorElem::lift(&ctx, s.x()), CofactorElem::lift(&ctx, s.y()));
    let dy = &y1 - &y;
    if dy.is_zero() {
        return Ok(None);
    }
    // q = x − y(x₁ − x)/(y₁ − y)
    let q1 = &x - &(&(&y * &(&x1 - &x)) * &dy.inv()?);
    let q2 = q1.conj();
    let one = base(&s.one());
    let dq = &q1 - &q2;
    let y2 = &y * &y;
    let r2 = &(&(&x * &x) + &y2) + &one;
    let num = &(&(&dq * &dq) * &r2) * &y2;
    let factor = |q: &CofactorElem| {
        let xq = &x - q;
        &(&(&xq * &xq) + &(&y2 * &(q * q))) + &y2
    };
    let den = &factor(&q1) * &factor(&q2);
    finish_formula(num, den)
}

fn finish_formula(num: CofactorElem, den: CofactorElem) -> Result<Option<AlgebraicReal>, TransformError> {
    let num = num.symmetric_part()?;
    let den = den.symmetric_part()?;
    if den.is_zero() {
        return Err(TransformError::DegenerateState);
    }
    Ok(Some(num.checked_div(&den)?))
}
