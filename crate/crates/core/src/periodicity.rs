//! Repeat detection on exact states and integer period certificates.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::CubicPolynomial;
use crate::matrix::IntMatrix3;
use crate::states::CubicState;

/// Canonical text of a normalized state: the reduced coefficients of `x`
/// and `y` in `(1, θ, θ²)` and the root indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(String);

impl StateKey {
    pub fn of(s: &CubicState) -> Self {
        let coeffs = |c: [BigRational; 3]| c.map(|q| q.to_string()).join(",");
        let [n1, n2] = s.nu_roots();
        StateKey(format!(
            "{}|{}{}|{}|{}",
            s.xi_root(),
            n1,
            n2,
            coeffs(s.x().coeffs()),
            coeffs(s.y().coeffs())
        ))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// First 16 hex digits of SHA-256 of the canonical text.
    pub fn short_hash(&self) -> String {
        Sha256::digest(self.0.as_bytes())[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Remembers the first step at which each key occurred.
#[derive(Default, Debug)]
pub struct RepeatDetector {
    seen: HashMap<StateKey, usize>,
}

impl RepeatDetector {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Some((i, j − i))` when `key` was first seen at step `i < j`;
    /// otherwise records it.
    pub fn probe(&mut self, key: StateKey, step: usize) -> Option<(usize, usize)> {
        match self.seen.get(&key) {
            Some(&i) => Some((i, step - i)),
            None => {
                self.seen.insert(key, step);
                None
            }
        }
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateChecks {
    pub commutes_with_a: bool,
    pub m1_unimodular: bool,
    pub charpoly_irreducible: bool,
    pub not_scalar: bool,
    pub state_key_recurrence: bool,
}

impl CertificateChecks {
    pub fn all_passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<CertificateCheck> {
        [
            (self.commutes_with_a, CertificateCheck::CommutesWithA),
            (self.m1_unimodular, CertificateCheck::M1Unimodular),
            (self.charpoly_irreducible, CertificateCheck::CharpolyIrreducible),
            (self.not_scalar, CertificateCheck::NotScalar),
            (self.state_key_recurrence, CertificateCheck::StateKeyRecurrence),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, c)| c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateCheck {
    CommutesWithA,
    M1Unimodular,
    CharpolyIrreducible,
    NotScalar,
    StateKeyRecurrence,
    Determinism,
}

impl fmt::Display for CertificateCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateCheck::CommutesWithA => "commutes_with_A",
            CertificateCheck::M1Unimodular => "m1_unimodular",
            CertificateCheck::CharpolyIrreducible => "charpoly_irreducible",
            CertificateCheck::NotScalar => "not_scalar",
            CertificateCheck::StateKeyRecurrence => "state_key_recurrence",
            CertificateCheck::Determinism => "determinism",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PeriodReport {
    pub preperiod_len: usize,
    pub period_len: usize,
    pub m1: IntMatrix3,
    pub m2: IntMatrix3,
    /// `M₁·M₂·M₁⁻¹`, or `M₁·M₂·adj(M₁)` if `M₁` is not unimodular.
    pub certificate: IntMatrix3,
    pub checks: CertificateChecks,
}

#[derive(Clone, Debug, Error)]
#[error("certificate check {check} failed")]
pub struct CertificateFailed {
    pub check: CertificateCheck,
    pub report: Box<PeriodReport>,
}

/// Builds and checks `M = M₁M₂M₁⁻¹`.
///
/// `prefix` holds every matrix up to the repeat point (stages included);
/// `period` the matrices of one period. `origin` is the input state in
/// the standard basis.
pub fn certify(
    a: &IntMatrix3,
    origin: &CubicState,
    prefix: &[IntMatrix3],
    period: &[IntMatrix3],
    preperiod_len: usize,
) -> Result<PeriodReport, CertificateFailed> {
    let m1 = product(prefix);
    let m2 = product(period);
    let d = m1.det();
    let adj = m1.adjugate();
    let m1_unimodular = m1.is_unimodular();
    let m1_inv = if d < BigInt::from(0) { adj.scale(&d) } else { adj };
    let certificate = &(&m1 * &m2) * &m1_inv;
    let commutes_with_a = &certificate * a == a * &certificate;
    let not_scalar = !certificate.is_scalar();
    let charpoly_irreducible = CubicPolynomial::new(certificate.char_poly())
        .map(|p| p.rational_root().is_none())
        .unwrap_or(false);
    let state_key_recurrence = recurrence_holds(origin, &m1, &(&m1 * &m2));
    let report = PeriodReport {
        preperiod_len,
        period_len: period.len(),
        m1,
        m2,
        certificate,
        checks: CertificateChecks {
            commutes_with_a,
            m1_unimodular,
            charpoly_irreducible,
            not_scalar,
            state_key_recurrence,
        },
    };
    match report.checks.first_failure() {
        None => Ok(report),
        Some(check) => Err(CertificateFailed {
            check,
            report: Box::new(report),
        }),
    }
}

/// Coordinates of the original ξ in bases `b1` and `b2`, recomputed from
/// scratch, agree after normalization.
fn recurrence_holds(origin: &CubicState, b1: &IntMatrix3, b2: &IntMatrix3) -> bool {
    let key = |b: &IntMatrix3| {
        origin
            .change_basis(b)
            .ok()
            .map(|s| (StateKey::of(&s), s.x().clone(), s.y().clone()))
    };
    match (key(b1), key(b2)) {
        (Some(k1), Some(k2)) => k1 == k2,
        _ => false,
    }
}

pub fn product(ms: &[IntMatrix3]) -> IntMatrix3 {
    ms.iter().fold(IntMatrix3::identity(), |acc, m| &acc * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CubicField;
    use crate::states::{state_from_matrix, RootChoice};

    fn key(s: &str) -> StateKey {
        StateKey(s.to_string())
    }

    #[test]
    fn probe_streams() {
        let mut d = RepeatDetector::new();
        let stream = ["k1", "k2", "k3", "k2"];
        let hits: Vec<_> = stream.iter().enumerate().map(|(i, k)| d.probe(key(k), i + 1)).collect();
        assert_eq!(hits, vec![None, None, None, Some((2, 2))]);

        let mut d = RepeatDetector::new();
        assert!((0..50).all(|i| d.probe(key(&i.to_string()), i).is_none()));
        assert_eq!(d.len(), 50);
    }

    #[test]
    fn keys_identify_exact_states() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let t = k.generator(1);
        let s1 = CubicState::from_coords(&k, 1, [t.clone(), t.square(), k.integer(1, 1)], IntMatrix3::identity()).unwrap();
        let two = k.integer(1, 2);
        let s2 = CubicState::from_coords(&k, 1, [&t * &two, &t.square() * &two, two.clone()], IntMatrix3::identity())
            .unwrap();
        assert_eq!(StateKey::of(&s1), StateKey::of(&s2));
        assert_eq!(StateKey::of(&s1).short_hash().len(), 16);
        let s3 = CubicState::from_coords(&k, 2, [t.conjugate(2), t.square().conjugate(2), k.integer(2, 1)], IntMatrix3::identity())
            .unwrap();
        assert_ne!(StateKey::of(&s1), StateKey::of(&s3));
    }

    #[test]
    fn scalar_certificate_rejected() {
        let a = IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 66]]);
        let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
        let err = certify(&a, &s, &[], &[IntMatrix3::identity()], 0).unwrap_err();
        assert_eq!(err.check, CertificateCheck::CharpolyIrreducible);
        assert!(!err.report.checks.not_scalar);
        // A itself fixes ξ projectively
        let ok = certify(&a, &s, &[], std::slice::from_ref(&a), 0).unwrap();
        assert_eq!(ok.certificate, a);
    }
}
