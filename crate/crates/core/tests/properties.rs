use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sin2jp::engine::{run_classical_jp, JpOptions};
use sin2jp::field::{AlgebraicReal, CubicField};
use sin2jp::matrix::IntMatrix3;
use sin2jp::numeric::{BigReal, Dyadic, NumericLiteral};
use sin2jp::periodicity::StateKey;
use sin2jp::states::{state_from_matrix, RootChoice};

fn field() -> CubicField {
    CubicField::from_coeffs([1, 0, -4, 1]).unwrap()
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-500i64..=500, 1i64..=40).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn element() -> impl Strategy<Value = (usize, [BigRational; 3])> {
    (0usize..3, [rational(), rational(), rational()])
}

fn make(root: usize, c: [BigRational; 3]) -> AlgebraicReal {
    AlgebraicReal::new(&field(), root, c)
}

fn unimodular() -> impl Strategy<Value = IntMatrix3> {
    prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 1..8).prop_map(|ops| {
        let mut m = IntMatrix3::identity();
        for (i, j, k) in ops {
            if i == j {
                continue;
            }
            let mut e = IntMatrix3::identity();
            e.set(i, j, BigInt::from(k));
            m = &m * &e;
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((r, a) in element(), b in [rational(), rational(), rational()], c in [rational(), rational(), rational()]) {
        let (a, b, c) = (make(r, a), make(r, b), make(r, c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn inverse_and_division((r, a) in element(), (_, b) in element()) {
        let (a, b) = (make(r, a), make(r, b));
        prop_assume!(!a.is_zero());
        let one = field().integer(r, 1);
        prop_assert_eq!(&a * &a.inv().unwrap(), one);
        prop_assert_eq!(&b.checked_div(&a).unwrap() * &a, b);
    }

    #[test]
    fn sign_is_multiplicative((r, a) in element(), (_, b) in element()) {
        let (a, b) = (make(r, a), make(r, b));
        prop_assert_eq!((&a * &b).sign(), a.sign() * b.sign());
        prop_assert_eq!((-&a).sign(), -a.sign());
        prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
    }

    #[test]
    fn floor_brackets_value((r, a) in element()) {
        let a = make(r, a);
        let f = BigRational::from_integer(a.floor());
        let d = a.add_rational(&-f);
        prop_assert!(!d.is_negative());
        prop_assert!(d.add_rational(&-BigRational::one()).is_negative());
    }

    #[test]
    fn enclosures_overlap_and_shrink((r, a) in element(), bits in 8u64..120) {
        let a = make(r, a);
        let (lo, hi) = a.enclosure(bits);
        let (lo2, hi2) = a.enclosure(bits + 64);
        prop_assert!(lo <= hi && lo2 <= hi2);
        prop_assert!(lo <= hi2 && lo2 <= hi);
        prop_assert!(&hi2 - &lo2 <= &hi - &lo);
        let x = BigRational::from_float(a.to_f64()).unwrap();
        let slack = BigRational::new(1.into(), 1_000_000_000.into()) * (BigRational::one() + x.abs());
        prop_assert!(&lo2 - &slack <= x && x <= &hi2 + &slack);
    }

    #[test]
    fn trace_over_embeddings_is_rational(c in [rational(), rational(), rational()]) {
        // Σ θᵢ = 0, Σ θᵢ² = 8 for t³ − 4t + 1
        let expected = &c[0] * BigRational::from_integer(3.into()) + &c[2] * BigRational::from_integer(8.into());
        let sum: f64 = (0..3).map(|r| make(r, c.clone()).to_f64()).sum();
        let e = num_traits::ToPrimitive::to_f64(&expected).unwrap();
        prop_assert!((sum - e).abs() <= 1e-9 * (1.0 + e.abs()));
    }

    #[test]
    fn conjugation_preserves_coefficients((r, a) in element(), s in 0usize..3) {
        let a = make(r, a);
        let b = a.conjugate(s);
        prop_assert_eq!(b.coeffs(), a.coeffs());
        prop_assert_eq!(b.root_index(), s);
        prop_assert_eq!(b.conjugate(r), a);
    }

    #[test]
    fn matrix_inverse_and_det(m in unimodular(), n in unimodular()) {
        prop_assert_eq!((&m * &n).det(), m.det() * n.det());
        let inv = m.inverse_unimodular().unwrap();
        prop_assert_eq!(&m * &inv, IntMatrix3::identity());
        prop_assert_eq!(&m.adjugate() * &m, IntMatrix3::identity().scale(&m.det()));
        let text = m.to_string();
        prop_assert_eq!(text.parse::<IntMatrix3>().unwrap(), m);
    }

    #[test]
    fn basis_change_round_trip(m in unimodular()) {
        let a = IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 66]]);
        let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
        let there = s.change_basis(&m).unwrap();
        let back = there.change_basis(&m.inverse_unimodular().unwrap()).unwrap();
        prop_assert_eq!(StateKey::of(&back), StateKey::of(&s));
        prop_assert_eq!(back.basis(), s.basis());
    }

    #[test]
    fn dyadic_rounding_encloses(x in rational(), y in rational(), bits in 4u64..200) {
        let lo = Dyadic::from_rational(&x, bits, false);
        let hi = Dyadic::from_rational(&x, bits, true);
        prop_assert!(lo.to_rational() <= x && x <= hi.to_rational());
        prop_assert!(lo.mantissa().bits() <= bits && hi.mantissa().bits() <= bits);
        let bx = BigReal::from_bounds(&x, &x, bits);
        let by = BigReal::from_bounds(&y, &y, bits);
        let s = bx.add(&by, bits);
        let exact = &x + &y;
        prop_assert!(s.lo().to_rational() <= exact && exact <= s.hi().to_rational());
        if !y.is_zero() {
            let quo = bx.quotient(&by, bits).unwrap();
            let exact = &x / &y;
            prop_assert!(quo.lo().to_rational() <= exact && exact <= quo.hi().to_rational());
            if let Some(f) = bx.floor_quotient(&by) {
                prop_assert_eq!(f, exact.floor().to_integer());
            }
        }
    }

    /// On integers the JP map is unimodular, so the gcd is invariant, and
    /// y strictly decreases, so the run ends with y = 0.
    #[test]
    fn integer_jp_terminates_and_keeps_gcd(v in [1i64..5000, 1i64..5000, 0i64..5000]) {
        let lits = v.map(|n| NumericLiteral::Rational(BigRational::from_integer(n.into())));
        let run = run_classical_jp(&lits, 10_000, &JpOptions::default()).unwrap();
        prop_assert!(run.terminated);
        prop_assert!(run.pairs.len() <= v[1] as usize + 1);
        let g0 = BigInt::from(v[0]).gcd(&BigInt::from(v[1])).gcd(&BigInt::from(v[2]));
        for s in &run.states {
            let ints: Vec<BigInt> = s.iter().map(|c| {
                assert!(c.is_exact());
                c.lo().to_rational().to_integer()
            }).collect();
            prop_assert_eq!(ints[0].gcd(&ints[1]).gcd(&ints[2]), g0.clone());
        }
        let last = run.states.last().unwrap();
        prop_assert_eq!(last[1].sign(), Some(Sign::NoSign));
    }
}

#[test]
fn rational_state_is_rejected() {
    assert!(state_from_matrix(&IntMatrix3::identity(), RootChoice::Largest).is_err());
    assert!(field().integer(0, 3).is_rational());
    assert_eq!(field().generator(2).floor(), BigInt::one());
    assert!(field().generator(0).floor() == BigInt::from(-3));
    assert!(!field().generator(1).is_zero());
    assert_eq!(Dyadic::zero().to_rational(), BigRational::zero());
}
