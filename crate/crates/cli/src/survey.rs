//! Random totally-real GL(3,ℤ) instances and a parallel batch runner.

use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sin2jp::engine::{run_sin2, EngineError, Limits};
use sin2jp::matrix::IntMatrix3;
use sin2jp::states::{state_from_matrix, RootChoice};

use crate::report::csv_row;

pub const MAX_ENTRY: i64 = 200;

/// Elementary `I + s·E_ij` with `i ≠ j`, `s = ±1`.
fn unipotent(rng: &mut ChaCha8Rng) -> IntMatrix3 {
    let i = rng.random_range(0..3);
    let j = (i + rng.random_range(1..3)) % 3;
    let mut m = IntMatrix3::identity();
    m.set(i, j, BigInt::from(if rng.random_bool(0.5) { 1 } else { -1 }));
    m
}

fn signed_permutation(rng: &mut ChaCha8Rng) -> IntMatrix3 {
    let mut order = [0usize, 1, 2];
    for k in (1..3).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut m = IntMatrix3::permutation(order);
    for (j, &i) in order.iter().enumerate() {
        if rng.random_bool(0.5) {
            m.set(i, j, BigInt::from(-1));
        }
    }
    m
}

/// A product of random elementary unipotents and signed permutations with
/// entries at most `max_entry` in absolute value whose characteristic
/// polynomial is irreducible with three real roots.
pub fn random_instance(rng: &mut ChaCha8Rng, max_entry: i64) -> IntMatrix3 {
    let bound = BigInt::from(max_entry);
    loop {
        let len = rng.random_range(6..=24);
        let mut m = IntMatrix3::identity();
        for _ in 0..len {
            let f = if rng.random_bool(0.8) { unipotent(rng) } else { signed_permutation(rng) };
            m = &m * &f;
        }
        if m.max_abs_entry() > bound {
            continue;
        }
        if state_from_matrix(&m, RootChoice::Largest).is_ok() {
            return m;
        }
    }
}

/// `count` instances from `seed`; the sequence depends only on the seed.
pub fn instances(count: usize, seed: u64, max_entry: i64) -> Vec<IntMatrix3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_entry)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certified { preperiod: usize, period: usize },
    BudgetExceeded,
    CertificateFailed(String),
    Error(String),
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Certified { .. } => "certified",
            Outcome::BudgetExceeded => "budget_exceeded",
            Outcome::CertificateFailed(_) => "certificate_failed",
            Outcome::Error(_) => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurveyRow {
    pub index: usize,
    pub matrix: IntMatrix3,
    pub discriminant: String,
    pub outcome: Outcome,
    pub steps: usize,
    pub descents: usize,
    pub cross_check_failures: usize,
    pub separating_failures: usize,
    pub ties: usize,
    pub wall_ms: u128,
}

pub const CSV_HEADER: &str =
    "index,matrix,discriminant,status,preperiod,period,steps,descents,cross_check_failures,separating_failures,ties,wall_ms";

impl SurveyRow {
    pub fn csv(&self) -> String {
        let (pre, per) = match self.outcome {
            Outcome::Certified { preperiod, period } => (preperiod.to_string(), period.to_string()),
            _ => (String::new(), String::new()),
        };
        csv_row(&[
            self.index.to_string(),
            self.matrix.to_string(),
            self.discriminant.clone(),
            self.outcome.status().to_string(),
            pre,
            per,
            self.steps.to_string(),
            self.descents.to_string(),
            self.cross_check_failures.to_string(),
            self.separating_failures.to_string(),
            self.ties.to_string(),
            self.wall_ms.to_string(),
        ])
    }
}

pub fn run_instance(index: usize, a: &IntMatrix3, limits: &Limits) -> SurveyRow {
    let start = Instant::now();
    let mut row = SurveyRow {
        index,
        matrix: a.clone(),
        discriminant: String::new(),
        outcome: Outcome::Error(String::new()),
        steps: 0,
        descents: 0,
        cross_check_failures: 0,
        separating_failures: 0,
        ties: 0,
        wall_ms: 0,
    };
    let origin = match state_from_matrix(a, RootChoice::Largest) {
        Ok(s) => s,
        Err(e) => {
            row.outcome = Outcome::Error(e.to_string());
            return row;
        }
    };
    row.discriminant = origin.field().discriminant().to_string();
    let (run, outcome) = match run_sin2(&origin, a, limits) {
        Ok(run) => {
            let p = run.period.as_ref().expect("successful runs carry a period");
            let o = Outcome::Certified {
                preperiod: p.preperiod_len,
                period: p.period_len,
            };
            (Some(run), o)
        }
        Err(EngineError::BudgetExceeded { run, .. }) => (Some(*run), Outcome::BudgetExceeded),
        Err(EngineError::CertificateFailed { failure, run }) => (Some(*run), Outcome::CertificateFailed(failure.check.to_string())),
        Err(e) => (None, Outcome::Error(e.to_string())),
    };
    if let Some(run) = run {
        row.steps = run.main_steps().count();
        row.descents = run.descents();
        for c in run.main_steps().filter_map(|r| r.checks.as_ref()) {
            if c.formula_f == Some(false) || c.formula_bar_f == Some(false) || c.symmetric == Some(false) {
                row.cross_check_failures += 1;
            }
            if !c.separating {
                row.separating_failures += 1;
            }
            if c.tied {
                row.ties += 1;
            }
        }
    }
    row.outcome = outcome;
    row.wall_ms = start.elapsed().as_millis();
    row
}

/// Runs every instance on the rayon pool; rows come back in index order.
pub fn run_survey(matrices: &[IntMatrix3], limits: &Limits) -> Vec<SurveyRow> {
    matrices
        .par_iter()
        .enumerate()
        .map(|(i, a)| run_instance(i, a, limits))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid_and_reproducible() {
        let a = instances(8, 7, MAX_ENTRY);
        assert_eq!(a, instances(8, 7, MAX_ENTRY));
        assert_ne!(a, instances(8, 8, MAX_ENTRY));
        for m in &a {
            assert!(m.is_unimodular());
            assert!(m.max_abs_entry() <= BigInt::from(MAX_ENTRY));
            assert!(state_from_matrix(m, RootChoice::Largest).is_ok());
        }
    }

    #[test]
    fn signed_permutations_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = signed_permutation(&mut rng);
            assert!(p.is_unimodular());
            assert_eq!(p.rows().iter().flatten().filter(|x| **x != BigInt::from(0)).count(), 3);
        }
    }
}
