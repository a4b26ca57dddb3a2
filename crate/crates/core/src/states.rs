//! Totally-real cubic states.
//!
//! A state stores only the coordinates of ξ, normalized to `(x, y, 1)`, as
//! elements of ℚ(θ_ξ). The conjugate vectors ν₁, ν₂ are never stored: their
//! coordinates in the same basis are the same coefficient vectors read at
//! the other two roots.

use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{AlgebraicReal, CofactorCtx, CofactorElem, CubicField, CubicPolynomial, FieldError};
use crate::matrix::IntMatrix3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
    #[error("characteristic polynomial is reducible over Q")]
    ReducibleCharPoly,
    #[error("not totally real (discriminant {0})")]
    NotTotallyReal(BigInt),
    #[error("eigenvector has a zero coordinate")]
    DegenerateEigenvector,
    #[error("(1, q1, q2) is not a basis of the quadratics")]
    NotABasis,
    #[error("basis is not supporting for xi")]
    NotSupporting,
    #[error("a coordinate of xi is zero")]
    ZeroCoordinate,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which real root carries ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootChoice {
    #[default]
    Largest,
    Index(usize),
}

impl RootChoice {
    fn index(self) -> Result<usize, StateError> {
        match self {
            RootChoice::Largest => Ok(2),
            RootChoice::Index(i) if i < 3 => Ok(i),
            RootChoice::Index(i) => Err(FieldError::BadRootIndex(i).into()),
        }
    }
}

/// Coordinates of ξ (normalized `(x, y, 1)`) and the accumulated basis.
#[derive(Clone, Debug)]
pub struct CubicState {
    field: CubicField,
    xi_root: usize,
    nu_roots: [usize; 2],
    x: AlgebraicReal,
    y: AlgebraicReal,
    basis: IntMatrix3,
}

/// Orthant position of a vector with respect to a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orthant {
    Inside,
    InsideNegated,
    Outside,
}

impl Orthant {
    pub fn contains_up_to_sign(self) -> bool {
        self != Orthant::Outside
    }
}

/// ξ, ν₁, ν₂ coordinates, each vector in its own embedding.
#[derive(Clone, Debug)]
pub struct ConjugateTriple {
    pub xi: [AlgebraicReal; 3],
    pub nu1: [AlgebraicReal; 3],
    pub nu2: [AlgebraicReal; 3],
}

impl CubicState {
    /// Builds a state from arbitrary (nonzero-last) coordinates of ξ.
    pub fn from_coords(
        field: &CubicField,
        xi_root: usize,
        coords: [AlgebraicReal; 3],
        basis: IntMatrix3,
    ) -> Result<Self, StateError> {
        let nu_roots = other_roots(xi_root);
        let [x, y, z] = coords;
        if z.is_zero() {
            return Err(StateError::DegenerateEigenvector);
        }
        let zi = z.inv()?;
        Ok(CubicState {
            field: field.clone(),
            xi_root,
            nu_roots,
            x: &x * &zi,
            y: &y * &zi,
            basis,
        })
    }

    pub fn field(&self) -> &CubicField {
        &self.field
    }

    pub fn xi_root(&self) -> usize {
        self.xi_root
    }

    /// Roots carrying ν₁ and ν₂, in ascending order.
    pub fn nu_roots(&self) -> [usize; 2] {
        self.nu_roots
    }

    pub fn x(&self) -> &AlgebraicReal {
        &self.x
    }

    pub fn y(&self) -> &AlgebraicReal {
        &self.y
    }

    pub fn basis(&self) -> &IntMatrix3 {
        &self.basis
    }

    pub fn one(&self) -> AlgebraicReal {
        self.field.integer(self.xi_root, 1)
    }

    /// `(x, y, 1)`.
    pub fn xi(&self) -> [AlgebraicReal; 3] {
        [self.x.clone(), self.y.clone(), self.one()]
    }

    /// Coordinates of νᵢ (`i ∈ {0, 1}`), normalized to last coordinate 1.
    pub fn nu(&self, i: usize) -> [AlgebraicReal; 3] {
        let r = self.nu_roots[i];
        [self.x.conjugate(r), self.y.conjugate(r), self.field.integer(r, 1)]
    }

    pub fn conjugate_triple(&self) -> ConjugateTriple {
        ConjugateTriple {
            xi: self.xi(),
            nu1: self.nu(0),
            nu2: self.nu(1),
        }
    }

    pub fn cofactor(&self) -> Arc<CofactorCtx> {
        self.field.cofactor(self.xi_root)
    }

    /// The state in the basis `basis · change`, i.e. coordinates `change⁻¹·ξ`.
    pub fn change_basis(&self, change: &IntMatrix3) -> Result<Self, StateError> {
        let inv = change
            .inverse_unimodular()
            .ok_or_else(|| StateError::NotUnimodular(change.det()))?;
        let coords = inv.apply(&self.xi());
        Self::from_coords(&self.field, self.xi_root, coords, &self.basis * change)
    }

    /// Replaces the coordinates, keeping field data; `basis` is the new
    /// accumulated basis.
    pub(crate) fn with_coords(&self, coords: [AlgebraicReal; 3], basis: IntMatrix3) -> Result<Self, StateError> {
        Self::from_coords(&self.field, self.xi_root, coords, basis)
    }

    /// Strictly positive and sorted `x > y > 1` (non-strict allowed for
    /// equal entries).
    pub fn is_sorted_positive(&self) -> bool {
        let one = self.one();
        self.x.compare(&self.y).is_ge() && self.y.compare(&one).is_ge()
    }

    /// `det(ξ, ν₁, ν₂) ≠ 0`, decided exactly in the cofactor extension.
    pub fn is_independent(&self) -> bool {
        let ctx = self.cofactor();
        let xi = self.xi().map(|c| CofactorElem::from_base(&ctx, c));
        let nu1 = self.xi().map(|c| CofactorElem::lift(&ctx, &c));
        let nu2 = nu1.clone().map(|c| c.conj());
        !crate::transforms::triple_det(&xi, &nu1, &nu2).is_zero()
    }

    /// Whether the current coordinate basis is separating.
    pub fn is_separating(&self) -> Result<bool, StateError> {
        is_separating(&self.conjugate_triple(), &IntMatrix3::identity())
    }

    /// An integer matrix, in the current coordinates, with ξ, ν₁, ν₂ as
    /// eigenvectors (the multiplication-by-θ map, cleared of denominators).
    pub fn eigen_matrix(&self) -> IntMatrix3 {
        eigen_matrix(&self.field, &self.xi())
    }
}

fn other_roots(root: usize) -> [usize; 2] {
    match root {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Eigenvector state of an integer matrix.
pub fn state_from_matrix(a: &IntMatrix3, choice: RootChoice) -> Result<CubicState, StateError> {
    let det = a.det();
    if !a.is_unimodular() {
        return Err(StateError::NotUnimodular(det));
    }
    let poly = CubicPolynomial::new(a.char_poly())?;
    let field = CubicField::new(poly).map_err(|e| match e {
        FieldError::ReduciblePolynomial { .. } => StateError::ReducibleCharPoly,
        FieldError::NotTotallyReal { discriminant } => StateError::NotTotallyReal(discriminant),
        other => other.into(),
    })?;
    let root = choice.index()?;
    let theta = field.generator(root);
    // rows of A − θI
    let rows: Vec<[AlgebraicReal; 3]> = (0..3)
        .map(|i| {
            [0, 1, 2].map(|j| {
                let e = field.rational(root, rat(a.get(i, j)));
                if i == j {
                    e - &theta
                } else {
                    e
                }
            })
        })
        .collect();
    // A − θI has rank 2; the cross product of two independent rows spans its kernel.
    let v = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(&rows[i], &rows[j]))
        .find(|v| v.iter().any(|c| !c.is_zero()))
        .ok_or(StateError::DegenerateEigenvector)?;
    if v.iter().any(AlgebraicReal::is_zero) {
        return Err(StateError::DegenerateEigenvector);
    }
    CubicState::from_coords(&field, root, v, IntMatrix3::identity())
}

/// Conjugate vectors `(q₁(θᵢ), q₂(θᵢ), 1)`. Quadratics are given by their
/// coefficients in ascending degree.
pub fn state_from_polynomials(
    p: &CubicPolynomial,
    q1: &[BigRational; 3],
    q2: &[BigRational; 3],
    choice: RootChoice,
) -> Result<CubicState, StateError> {
    let basis_det = {
        // rows: 1, q₁, q₂ in the power basis
        let m = [
            [BigRational::one(), BigRational::zero(), BigRational::zero()],
            q1.clone(),
            q2.clone(),
        ];
        &m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]
    };
    if basis_det.is_zero() {
        return Err(StateError::NotABasis);
    }
    let field = CubicField::new(p.clone()).map_err(|e| match e {
        FieldError::NotTotallyReal { discriminant } => StateError::NotTotallyReal(discriminant),
        other => other.into(),
    })?;
    let root = choice.index()?;
    let x = AlgebraicReal::new(&field, root, q1.clone());
    let y = AlgebraicReal::new(&field, root, q2.clone());
    CubicState::from_coords(&field, root, [x, y, field.integer(root, 1)], IntMatrix3::identity())
}

pub(crate) fn cross(a: &[AlgebraicReal; 3], b: &[AlgebraicReal; 3]) -> [AlgebraicReal; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Integer multiple of the matrix `Q·C·Q⁻¹`, where `Q` holds the coefficient
/// vectors of `v`'s coordinates and `C` is multiplication by θ on `(1, θ, θ²)`.
/// Every conjugate of `v` is an eigenvector.
pub fn eigen_matrix(field: &CubicField, v: &[AlgebraicReal; 3]) -> IntMatrix3 {
    let q: Vec<[BigRational; 3]> = v.iter().map(AlgebraicReal::coeffs).collect();
    let [c3, c2, c1, c0] = field.polynomial().coeffs();
    let lead = rat(c3);
    // θ·θ² = −(c₂θ² + c₁θ + c₀)/c₃
    let comp = [
        [BigRational::zero(), BigRational::one(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::one()],
        [-rat(c0) / &lead, -rat(c1) / &lead, -rat(c2) / &lead],
    ];
    let qc: Vec<[BigRational; 3]> = q
        .iter()
        .map(|row| [0, 1, 2].map(|j| (0..3).map(|k| &row[k] * &comp[k][j]).sum()))
        .collect();
    let q_inv = invert_rational(&q).expect("coordinates of a cubic vector are independent");
    let a: Vec<[BigRational; 3]> = qc
        .iter()
        .map(|row| [0, 1, 2].map(|j| (0..3).map(|k| &row[k] * &q_inv[k][j]).sum()))
        .collect();
    let den = a.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let rows = [0, 1, 2].map(|i| [0, 1, 2].map(|j| (&a[i][j] * rat(&den)).to_integer()));
    IntMatrix3::new(rows)
}

fn invert_rational(m: &[[BigRational; 3]]) -> Option<Vec<[BigRational; 3]>> {
    let minor = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]]
    };
    let det: BigRational = (0..3)
        .map(|j| {
            let t = &m[0][j] * minor(0, j);
            if j == 1 {
                -t
            } else {
                t
            }
        })
        .sum();
    if det.is_zero() {
        return None;
    }
    Some(
        (0..3)
            .map(|i| {
                [0, 1, 2].map(|j| {
                    let c = minor(j, i) / &det;
                    if (i + j) % 2 == 1 {
                        -c
                    } else {
                        c
                    }
                })
            })
            .collect(),
    )
}

/// Position of `v` relative to the non-negative orthant of the basis given
/// by the columns of `b` (`det b = ±1`): solves `b·c = v` exactly.
pub fn orthant_membership(v: &[AlgebraicReal; 3], b: &IntMatrix3) -> Orthant {
    let inv = b.inverse_unimodular().expect("basis must be unimodular");
    let c = inv.apply(v);
    let signs: Vec<Sign> = c.iter().map(AlgebraicReal::sign).collect();
    if signs.iter().all(|&s| s != Sign::Minus) {
        Orthant::Inside
    } else if signs.iter().all(|&s| s != Sign::Plus) {
        Orthant::InsideNegated
    } else {
        Orthant::Outside
    }
}

/// A supporting basis is separating when its orthant does not hold both ±ν₁
/// and ±ν₂.
pub fn is_separating(s: &ConjugateTriple, b: &IntMatrix3) -> Result<bool, StateError> {
    if !orthant_membership(&s.xi, b).contains_up_to_sign() {
        return Err(StateError::NotSupporting);
    }
    let n1 = orthant_membership(&s.nu1, b).contains_up_to_sign();
    let n2 = orthant_membership(&s.nu2, b).contains_up_to_sign();
    Ok(!(n1 && n2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_a() -> IntMatrix3 {
        IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 66]])
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn example_eigenvector() {
        let s = state_from_matrix(&example_a(), RootChoice::Largest).unwrap();
        assert_eq!(s.x().to_decimal(11), "0.02189094967");
        // independent oracle: mpmath eig at 40 digits gives -0.14795590447907...
        assert_eq!(s.y().to_decimal(13), "-0.1479559044791");
        assert_eq!(s.xi_root(), 2);
        assert_eq!(s.nu_roots(), [0, 1]);
    }

    #[test]
    fn eigenvector_residual_is_exactly_zero() {
        let a = example_a();
        for root in 0..3 {
            let s = state_from_matrix(&a, RootChoice::Index(root)).unwrap();
            let v = s.xi();
            let av = a.apply(&v);
            let theta = s.field().generator(root);
            for i in 0..3 {
                assert!((&av[i] - &(&theta * &v[i])).is_zero());
            }
            // conjugates are eigenvectors too
            for k in 0..2 {
                let nu = s.nu(k);
                let r = s.nu_roots()[k];
                let an = a.apply(&nu);
                let th = s.field().generator(r);
                for i in 0..3 {
                    assert!((&an[i] - &(&th * &nu[i])).is_zero());
                }
            }
            assert!(s.is_independent());
        }
    }

    #[test]
    fn matrix_errors() {
        assert_eq!(
            state_from_matrix(&IntMatrix3::identity(), RootChoice::Largest).unwrap_err(),
            StateError::ReducibleCharPoly
        );
        let two = IntMatrix3::from_rows([[2, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert!(matches!(
            state_from_matrix(&two, RootChoice::Largest),
            Err(StateError::NotUnimodular(_))
        ));
        // companion of t³ − 2 has det 2; t³ − t − 1 has one real root
        let c = IntMatrix3::from_rows([[0, 0, 1], [1, 0, 1], [0, 1, 0]]);
        assert!(matches!(
            state_from_matrix(&c, RootChoice::Largest),
            Err(StateError::NotTotallyReal(_))
        ));
    }

    #[test]
    fn polynomial_states() {
        let p = CubicPolynomial::from_i64([1, 0, -4, 1]).unwrap();
        let t = [q(0), q(1), q(0)];
        let t2 = [q(0), q(0), q(1)];
        let s = state_from_polynomials(&p, &t, &t2, RootChoice::Largest).unwrap();
        let theta = s.field().generator(2);
        assert_eq!(s.x(), &theta);
        assert_eq!(s.y(), &theta.square());
        let nu = s.nu(0);
        assert_eq!(nu[0], s.field().generator(0));

        let bad = [q(3), q(2), q(0)];
        assert_eq!(
            state_from_polynomials(&p, &t, &bad, RootChoice::Largest).unwrap_err(),
            StateError::NotABasis
        );
        let p2 = CubicPolynomial::from_i64([1, 0, 0, -2]).unwrap();
        assert!(matches!(
            state_from_polynomials(&p2, &t, &t2, RootChoice::Largest),
            Err(StateError::NotTotallyReal(_))
        ));
    }

    #[test]
    fn eigen_matrix_commutes_with_source() {
        let a = example_a();
        let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
        let e = s.eigen_matrix();
        assert_eq!(&e * &a, &a * &e);
        let p = CubicPolynomial::from_i64([1, 0, -4, 1]).unwrap();
        let s = state_from_polynomials(&p, &[q(0), q(1), q(0)], &[q(0), q(0), q(1)], RootChoice::Largest).unwrap();
        let e = s.eigen_matrix();
        let v = e.apply(&s.xi());
        let th = s.field().generator(2);
        for (vi, xi) in v.iter().zip(s.xi().iter()) {
            assert!((vi - &(&th * xi)).is_zero());
        }
    }

    fn rational_vec(k: &CubicField, v: [i64; 3]) -> [AlgebraicReal; 3] {
        v.map(|x| k.integer(0, x))
    }

    #[test]
    fn orthants() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let id = IntMatrix3::identity();
        assert_eq!(orthant_membership(&rational_vec(&k, [1, 2, 3]), &id), Orthant::Inside);
        assert_eq!(orthant_membership(&rational_vec(&k, [-1, -2, -3]), &id), Orthant::InsideNegated);
        assert_eq!(orthant_membership(&rational_vec(&k, [1, -2, 3]), &id), Orthant::Outside);
    }

    #[test]
    fn orthant_equivariance() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let v = [k.generator(2), k.generator(2).square(), k.integer(2, -1)];
        let m = IntMatrix3::from_rows([[1, 2, 0], [0, 1, -1], [1, 2, 1]]);
        assert!(m.is_unimodular());
        let mi = m.inverse_unimodular().unwrap();
        for b in [IntMatrix3::identity(), IntMatrix3::from_rows([[1, 1, 0], [0, 1, 0], [0, 0, 1]])] {
            let lhs = orthant_membership(&v, &b);
            let rhs = orthant_membership(&mi.apply(&v), &(&mi * &b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn separating_cases() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let id = IntMatrix3::identity();
        let xi = rational_vec(&k, [3, 2, 1]);
        let out = ConjugateTriple {
            xi: xi.clone(),
            nu1: rational_vec(&k, [1, -1, 1]),
            nu2: rational_vec(&k, [-1, 1, 1]),
        };
        assert!(is_separating(&out, &id).unwrap());
        let both = ConjugateTriple {
            xi: xi.clone(),
            nu1: rational_vec(&k, [1, 1, 1]),
            nu2: rational_vec(&k, [-1, -1, -2]),
        };
        assert!(!is_separating(&both, &id).unwrap());
        let unsupported = ConjugateTriple {
            xi: rational_vec(&k, [1, -1, 1]),
            nu1: xi.clone(),
            nu2: xi,
        };
        assert_eq!(is_separating(&unsupported, &id).unwrap_err(), StateError::NotSupporting);
    }

    #[test]
    fn change_basis_tracks_coordinates() {
        let s = state_from_matrix(&example_a(), RootChoice::Largest).unwrap();
        let m = IntMatrix3::from_rows([[0, 0, 1], [0, -1, 0], [1, 0, 0]]);
        let t = s.change_basis(&m).unwrap();
        // B·c ∝ ξ: cross product with the original coordinates vanishes
        let back = t.basis().apply(&t.xi());
        assert!(cross(&back, &s.xi()).iter().all(AlgebraicReal::is_zero));
        assert!(t.x().is_positive() && t.y().is_positive());
        assert!(t.x().compare(t.y()).is_gt());
        assert!(t.y().compare(&t.one()).is_gt());
    }
}
