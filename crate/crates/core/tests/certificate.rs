use sin2jp::engine::{run_sin2, Limits};
use sin2jp::matrix::IntMatrix3;
use sin2jp::periodicity::{certify, product, CertificateCheck};
use sin2jp::states::{state_from_matrix, RootChoice};

fn example_a() -> IntMatrix3 {
    IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 66]])
}

fn pieces() -> (Vec<IntMatrix3>, Vec<IntMatrix3>, usize) {
    let a = example_a();
    let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
    let run = run_sin2(&s, &a, &Limits::default()).unwrap();
    let p = run.period.as_ref().unwrap();
    let stages = run.records.len() - run.main_steps().count();
    let mats: Vec<IntMatrix3> = run.records.iter().map(|r| r.matrix.clone()).collect();
    let cut = stages + p.preperiod_len;
    (mats[..cut].to_vec(), mats[cut..cut + p.period_len].to_vec(), p.preperiod_len)
}

#[test]
fn example_certificate() {
    let a = example_a();
    let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
    let (prefix, period, pre) = pieces();
    let r = certify(&a, &s, &prefix, &period, pre).unwrap();
    assert_eq!(r.certificate.to_string(), "-1,18,8;8,-121,-54;-54,818,365");
    assert_eq!(&r.certificate * &a, &a * &r.certificate);
    assert_eq!(r.m1, product(&prefix));
    assert!(r.checks.all_passed());
}

#[test]
fn tampered_target_fails_commutation() {
    let s = state_from_matrix(&example_a(), RootChoice::Largest).unwrap();
    let (prefix, period, pre) = pieces();
    let wrong = IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 65]]);
    let e = certify(&wrong, &s, &prefix, &period, pre).unwrap_err();
    assert_eq!(e.check, CertificateCheck::CommutesWithA);
}

#[test]
fn tampered_period_matrix_fails() {
    let a = example_a();
    let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
    let (prefix, mut period, pre) = pieces();
    // Φ₈ with its 16 bumped to 17 stays unimodular but leaves the orbit
    let mut m = period[4].clone();
    assert_eq!(m.to_string(), "1,16,4;0,4,1;0,1,0");
    m.set(0, 1, 17.into());
    period[4] = m;
    let e = certify(&a, &s, &prefix, &period, pre).unwrap_err();
    assert_eq!(e.check, CertificateCheck::CommutesWithA);
}

#[test]
fn shifted_cycle_is_still_a_certificate() {
    // starting the cycle one step later conjugates the certificate
    let a = example_a();
    let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
    let (mut prefix, mut period, pre) = pieces();
    let first = period.remove(0);
    prefix.push(first.clone());
    period.push(first);
    let r = certify(&a, &s, &prefix, &period, pre + 1).unwrap();
    assert_eq!(r.certificate.to_string(), "-1,18,8;8,-121,-54;-54,818,365");
}
